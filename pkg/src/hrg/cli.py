"""Command-line workflows: generate, analyze, predict, compare, validate-measures.

Every run writes a canonical ``run.cfg`` (key = value, mirroring the flags)
plus a ``manifest.json`` recording the tool version, the resolved
configuration and SHA-256 hashes of all outputs, so any run can be
reproduced bit-identically from its manifest.

Exit codes: 0 success, 1 validation/tolerance failure, 2 usage error,
3 I/O or input-format error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import hrg
from hrg.geometry import Params, measure_ball_origin
from hrg.sampling import (
    SeededStream,
    sample_coordinates,
    write_coordinates_csv,
    read_coordinates_csv,
)
from hrg.generator import (
    build_bucketed,
    write_edge_list,
    read_edge_list,
    EdgeListFormatError,
)
from hrg import stats as hstats
from hrg import predictions as hpred
from hrg import oracle as horacle

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_IO = 3

ENV_OUTPUT_DIR = "HRG_OUT"


class UsageError(Exception):
    pass


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def write_run_config(path: Path, command: str, config: dict) -> None:
    """Canonical key = value echo of the resolved run configuration."""
    lines = [f"command = {command}"]
    for key in sorted(config):
        if config[key] is None:
            continue
        lines.append(f"{key.replace('_', '-')} = {_fmt_value(config[key])}")
    path.write_text("\n".join(lines) + "\n")


def read_run_config(path: Path) -> tuple[str | None, dict[str, str]]:
    """Read a run.cfg (key = value) or a manifest.json with a config block."""
    text = path.read_text()
    if path.suffix == ".json":
        manifest = json.loads(text)
        values = {k: _fmt_value(v) for k, v in manifest.get("config", {}).items()}
        values.pop("out", None)  # manifests describe a finished run; pick a fresh dir
        return manifest.get("command"), values
    command = None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "command":
            command = value
        else:
            values[key] = value
    return command, values


def write_manifest(out_dir: Path, command: str, config: dict,
                   outputs: list[Path], inputs: dict[str, Path] | None = None,
                   derived: dict | None = None) -> Path:
    manifest = {
        "tool": "hrg",
        "version": hrg.__version__,
        "command": command,
        "config": {k: v for k, v in config.items() if v is not None},
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    if inputs:
        manifest["inputs"] = {name: _sha256(Path(p)) for name, p in inputs.items()}
    if derived:
        manifest["derived"] = derived
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _resolve_out(args, command: str) -> Path:
    if args.out is not None:
        out = Path(args.out)
    else:
        out = Path(os.environ.get(ENV_OUTPUT_DIR, ".")) / f"hrg-{command}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params_from_args(args) -> Params:
    if args.alpha is None or args.C is None or args.n is None:
        raise UsageError("this command requires --alpha, --C and --n")
    if not args.alpha > 0.5:
        raise UsageError(
            f"--alpha must exceed 1/2 (model constraint alpha > 1/2), got {args.alpha}"
        )
    try:
        return Params(alpha=args.alpha, C=args.C, n=args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_seeds(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"--seeds must be a comma-separated integer list, got {text!r}") from None


def _write_two_column(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {header}\n")
        for a, b in rows:
            fh.write(f"{a:.10g} {b:.10g}\n" if isinstance(a, float) else f"{a} {b:.10g}\n")


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    params = _params_from_args(args)
    if args.seed is None:
        raise UsageError("generate requires --seed")
    out = _resolve_out(args, "generate")
    coords = sample_coordinates(params, SeededStream(args.seed))
    graph = build_bucketed(coords, params, band_width=args.band_width)

    edges_path = out / "edges.txt"
    coords_path = out / "coords.csv"
    write_edge_list(graph, edges_path)
    write_coordinates_csv(coords, coords_path)

    config = {
        "alpha": params.alpha, "C": params.C, "n": params.n, "seed": args.seed,
        "band_width": args.band_width, "threads": args.threads, "out": str(out),
    }
    cfg_path = out / "run.cfg"
    write_run_config(cfg_path, "generate", config)
    write_manifest(out, "generate", config, [edges_path, coords_path, cfg_path],
                   derived={"R": params.R, "edge_count": graph.edge_count,
                            "average_degree": hstats.average_degree(graph)})
    print(f"generated n={params.n} graph: {graph.edge_count} edges -> {out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.edges is None:
        raise UsageError("analyze requires --edges")
    out = _resolve_out(args, "analyze")
    coords = read_coordinates_csv(args.coords) if args.coords else None
    params = None
    if args.alpha is not None and args.C is not None:
        n = args.n if args.n is not None else (len(coords) if coords else None)
        if n is None:
            raise UsageError("--alpha/--C given but n is unknown; pass --n or --coords")
        params = Params(alpha=args.alpha, C=args.C, n=n)
    graph = read_edge_list(args.edges, n=args.n, params=params, coords=coords)

    slope_range = None
    if args.k_min is not None and args.k_max is not None:
        slope_range = (args.k_min, args.k_max)
    report = hstats.build_stats_report(
        graph,
        beta=args.beta if (coords is not None and params is not None) else None,
        slope_range=slope_range,
        slope_estimator=args.estimator,
        with_clustering=not args.no_clustering,
    )
    stats_path = out / "stats.json"
    stats_path.write_text(report.to_json() + "\n")

    hist_path = out / "degree_histogram.dat"
    _write_two_column(hist_path, "degree count",
                      sorted(report.degree_histogram.items()))
    outputs = [stats_path, hist_path]

    predicted = None
    if params is not None:
        predicted = {k: hpred.predicted_degree_fraction(k, params)
                     for k in range(0, max(report.degree_histogram, default=1) + 1)}
    if coords is not None and params is not None:
        centers, means, counts = hstats.radius_degree_profile(graph)
        rows = [(float(c), float(m)) for c, m, k in zip(centers, means, counts) if k > 0]
        rd_path = out / "radius_degree.dat"
        _write_two_column(rd_path, "radius mean_degree", rows)
        outputs.append(rd_path)
        if not args.no_figures:
            from hrg import figures
            pred_curve = [hpred.expected_degree_at_radius(min(c, params.R), params)
                          for c in centers]
            fig_path = out / "radius_degree.png"
            figures.save_radius_degree(centers, means, counts, fig_path, predicted=pred_curve)
            outputs.append(fig_path)
    if not args.no_figures:
        from hrg import figures
        fig_path = out / "degree_distribution.png"
        figures.save_degree_distribution(report.degree_histogram, graph.n, fig_path,
                                         predicted=predicted)
        outputs.append(fig_path)

    config = {
        "edges": str(args.edges), "coords": str(args.coords) if args.coords else None,
        "alpha": args.alpha, "C": args.C, "n": args.n, "beta": args.beta,
        "k_min": args.k_min, "k_max": args.k_max, "estimator": args.estimator,
        "no_clustering": args.no_clustering, "no_figures": args.no_figures,
        "out": str(out),
    }
    cfg_path = out / "run.cfg"
    write_run_config(cfg_path, "analyze", config)
    inputs = {"edges": args.edges}
    if args.coords:
        inputs["coords"] = args.coords
    write_manifest(out, "analyze", config, outputs + [cfg_path], inputs=inputs)
    print(f"analyzed {args.edges}: n={graph.n}, m={graph.edge_count} -> {out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    params = _params_from_args(args)
    out = _resolve_out(args, "predict")
    report = hpred.build_prediction_report(params, k_max=args.k_max, betas=(args.beta,))
    pred_path = out / "prediction.json"
    pred_path.write_text(report.to_json() + "\n")
    frac_path = out / "degree_fraction.dat"
    _write_two_column(frac_path, "degree predicted_fraction",
                      sorted(report.degree_fraction.items()))
    outputs = [pred_path, frac_path]
    if not args.no_figures:
        from hrg import figures
        fig_path = out / "predicted_degree_distribution.png"
        figures.save_degree_distribution({}, params.n, fig_path,
                                         predicted=report.degree_fraction,
                                         title="predicted degree law")
        outputs.append(fig_path)
    config = {
        "alpha": params.alpha, "C": params.C, "n": params.n, "k_max": args.k_max,
        "beta": args.beta, "no_figures": args.no_figures, "out": str(out),
    }
    cfg_path = out / "run.cfg"
    write_run_config(cfg_path, "predict", config)
    write_manifest(out, "predict", config, outputs + [cfg_path])
    print(f"predicted average degree {report.average_degree:.6g} -> {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _params_from_args(args)
    seeds = _parse_seeds(args.seeds)
    if not seeds:
        raise UsageError("compare requires at least one seed (--seeds)")
    out = _resolve_out(args, "compare")
    overrides = {}
    # each --tol may carry several KEY=VALUE pairs joined by commas (the
    # run.cfg echo stores repeated flags that way)
    for item in args.tol or []:
        for part in item.split(","):
            key, _, value = part.partition("=")
            if not value:
                raise UsageError(f"--tol expects KEY=VALUE, got {part!r}")
            if key not in horacle.DEFAULT_TOLERANCES:
                raise UsageError(f"unknown tolerance key {key!r}; "
                                 f"choices: {sorted(horacle.DEFAULT_TOLERANCES)}")
            try:
                overrides[key] = float(value)
            except ValueError:
                raise UsageError(f"--tol value for {key!r} must be numeric, "
                                 f"got {value!r}") from None
    table = horacle.campaign(params, seeds, beta=args.beta, tolerances=overrides,
                             threads=args.threads)
    csv_path = out / "comparison.csv"
    csv_path.write_text(table.to_csv_text())
    txt_path = out / "comparison.txt"
    txt_path.write_text(table.to_text())
    outputs = [csv_path, txt_path]
    if not args.no_figures:
        from hrg import figures
        fig_path = out / "comparison.png"
        figures.save_comparison(table, fig_path)
        outputs.append(fig_path)
    config = {
        "alpha": params.alpha, "C": params.C, "n": params.n,
        "seeds": list(seeds), "beta": args.beta,
        "tol": list(args.tol) if args.tol else None,
        "threads": args.threads, "no_figures": args.no_figures, "out": str(out),
    }
    cfg_path = out / "run.cfg"
    write_run_config(cfg_path, "compare", config)
    write_manifest(out, "compare", config, outputs + [cfg_path])
    sys.stdout.write(table.to_text())
    return EXIT_OK if table.passed() else EXIT_TOLERANCE


def cmd_validate_measures(args) -> int:
    alphas = tuple(float(a) for a in args.alphas.split(","))
    x_fracs = tuple(float(x) for x in args.x_fracs.split(","))
    out = _resolve_out(args, "validate-measures")
    configs = [(a, f) for a in alphas for f in x_fracs]

    jobs = [(a, f, args.C, args.n, args.samples, args.seed + i)
            for i, (a, f) in enumerate(configs)]
    if args.threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_validate_one, jobs))
    else:
        rows = [_validate_one(job) for job in jobs]

    n_pass = sum(1 for row in rows if row["pass"])
    frac = n_pass / len(rows)
    csv_path = out / "measure_validation.csv"
    with open(csv_path, "w", newline="\n") as fh:
        fh.write("alpha,x_frac,x,exact,mc_mean,std_error,z,pass\n")
        for row in rows:
            fh.write(f"{row['alpha']:g},{row['x_frac']:g},{row['x']:.10g},"
                     f"{row['exact']:.10g},{row['mc']:.10g},{row['stderr']:.4g},"
                     f"{row['z']:.4g},{int(row['pass'])}\n")
    txt_path = out / "measure_validation.txt"
    txt_path.write_text(
        f"{n_pass}/{len(rows)} configurations within 3 sigma "
        f"({100 * frac:.1f}%, requirement >= 99%)\n"
    )
    outputs = [csv_path, txt_path]
    if not args.no_figures:
        from hrg import figures
        fig_path = out / "measure_validation.png"
        figures.save_measure_validation(
            [f"a={row['alpha']:g},x={row['x_frac']:g}R" for row in rows],
            [row["z"] for row in rows], fig_path)
        outputs.append(fig_path)
    config = {
        "alphas": args.alphas, "x_fracs": args.x_fracs, "C": args.C, "n": args.n,
        "samples": args.samples, "seed": args.seed, "threads": args.threads,
        "no_figures": args.no_figures, "out": str(out),
    }
    cfg_path = out / "run.cfg"
    write_run_config(cfg_path, "validate-measures", config)
    write_manifest(out, "validate-measures", config, outputs + [cfg_path])
    print(txt_path.read_text().strip())
    return EXIT_OK if frac >= 0.99 else EXIT_TOLERANCE


def _validate_one(job) -> dict:
    alpha, x_frac, big_c, n, samples, seed = job
    params = Params(alpha=alpha, C=big_c, n=n)
    x = x_frac * params.R
    exact = measure_ball_origin(x, params)
    est = horacle.mc_measure(horacle.BallOrigin(x), params, samples, SeededStream(seed))
    if est.std_error > 0:
        z = (est.mean - exact) / est.std_error
        ok = abs(z) <= 3.0
    else:
        z = float("nan")
        ok = False
    if not ok:
        # tiny expected hit counts degenerate the normal test; fall back to an
        # exact two-sided binomial check at the same 3-sigma level
        from scipy.stats import binom

        level = 0.00135
        hits = round(est.mean * samples)
        ok = (binom.cdf(hits, samples, exact) > level
              and binom.sf(hits - 1, samples, exact) > level)
    return {"alpha": alpha, "x_frac": x_frac, "x": x, "exact": exact,
            "mc": est.mean, "stderr": est.std_error, "z": z, "pass": ok}


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT_DIR} or cwd)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker-process cap for parallel sections")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.add_argument("--config", help="read defaults from a run.cfg-style file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrg",
        description="Hyperbolic random graphs: generate, measure, and check "
                    "against closed-form predictions.",
    )
    parser.add_argument("--version", action="version", version=f"hrg {hrg.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample coordinates and build the edge set")
    p.add_argument("--alpha", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--band-width", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="measure an edge-list file")
    p.add_argument("--edges")
    p.add_argument("--coords")
    p.add_argument("--alpha", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--estimator", choices=("ols", "hill"), default="ols")
    p.add_argument("--no-clustering", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="evaluate the closed-form predictions")
    p.add_argument("--alpha", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--beta", type=float, default=0.8)
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="multi-seed empirical vs predicted campaign")
    p.add_argument("--alpha", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seeds", default="", help="comma-separated seed list")
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                   help="tolerance override (repeatable)")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate-measures",
                       help="Monte Carlo validation of the closed-form measures")
    p.add_argument("--alphas", default="0.6,0.75,1.0")
    p.add_argument("--x-fracs", default="0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--C", type=float, default=0.0)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_validate_measures)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Expand --config FILE into leading defaults (explicit flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config requires a file path")
    cfg_path = Path(argv[idx + 1])
    if not cfg_path.exists():
        raise UsageError(f"config file {cfg_path} does not exist")
    command, values = read_run_config(cfg_path)
    rest = argv[:idx] + argv[idx + 2:]
    head = [rest[0]] if rest and not rest[0].startswith("-") else ([command] if command else [])
    tail = rest[1:] if rest and not rest[0].startswith("-") else rest
    expanded = list(head)
    for key, value in sorted(values.items()):
        flag = "--" + key.replace("_", "-")
        if flag in tail:
            continue
        if value == "true":
            expanded.append(flag)
        elif value == "false":
            continue
        else:
            expanded.extend([flag, value])
    expanded.extend(tail)
    if not head:
        raise UsageError("config file lacks a command and none was given")
    return expanded


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EdgeListFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # inconsistent inputs surfaced by the library (bad ids, ranges, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
