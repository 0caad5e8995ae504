"""Independent references: Monte Carlo region measures and multi-seed campaigns.

The Monte Carlo estimator draws points from the model density and evaluates
region membership with the exact distance function only, never with the
closed-form or quadrature measure code, so the two routes stay independent.
Campaigns operationalize the theory's high-probability statements as
multi-seed dispersion and tolerance checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from hrg.geometry import Params, distance_arrays
from hrg.sampling import SeededStream, sample_polar, sample_coordinates
from hrg.generator import build_bucketed
from hrg import stats as hstats
from hrg import predictions as hpred

__all__ = [
    "MCEstimate",
    "BallOrigin",
    "Intersection",
    "Triple",
    "mc_measure",
    "ComparisonRow",
    "ComparisonTable",
    "campaign",
]

MIN_MC_SAMPLES = 1_000
_MC_BATCH = 1 << 20

DEFAULT_TOLERANCES = {
    "average_degree": 0.10,
    "average_degree_dispersion": 0.10,
    "max_degree_exponent": 0.12,   # absolute band around 1/(2 alpha)
    "global_clustering_floor": 0.05,
    "inner_count_factor": 3.0,
    "degree_fraction": 0.15,
    "degree_fraction_min_expected": 500.0,
    "tail_fraction": 0.15,
    "tail_fraction_min_expected": 100.0,
}


@dataclass(frozen=True)
class BallOrigin:
    """B_0(x): points within distance x of the disk center."""
    x: float


@dataclass(frozen=True)
class Intersection:
    """(B_r(R) ∩ B_0(R)) \\ B_0(x) for a pole at angular coordinate 0."""
    r: float
    x: float = 0.0


@dataclass(frozen=True)
class Triple:
    """B_0(R) ∩ B_{r1,0}(R) ∩ B_{r2,theta}(R) \\ B_0(x)."""
    r1: float
    r2: float
    theta: float
    x: float = 0.0


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    samples: int

    def __post_init__(self):
        if self.samples < MIN_MC_SAMPLES:
            raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {self.samples}")


def _indicator(region, r: np.ndarray, theta: np.ndarray, params: Params) -> np.ndarray:
    R = params.R
    d_origin = distance_arrays(np.zeros_like(r), np.zeros_like(theta), r, theta)
    if isinstance(region, BallOrigin):
        return d_origin <= region.x
    if isinstance(region, Intersection):
        hit = distance_arrays(np.full_like(r, region.r), np.zeros_like(theta), r, theta) <= R
        return hit & (d_origin <= R) & (d_origin > region.x)
    if isinstance(region, Triple):
        hit1 = distance_arrays(np.full_like(r, region.r1), np.zeros_like(theta), r, theta) <= R
        hit2 = distance_arrays(np.full_like(r, region.r2),
                               np.full_like(theta, region.theta), r, theta) <= R
        return hit1 & hit2 & (d_origin <= R) & (d_origin > region.x)
    raise TypeError(f"unknown region descriptor {region!r}")


def mc_measure(region, params: Params, samples: int, stream: SeededStream) -> MCEstimate:
    """Monte Carlo estimate of a region's mass under the model density."""
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {samples}")
    gen = stream.generator()
    hits = 0
    remaining = samples
    while remaining > 0:
        batch = min(_MC_BATCH, remaining)
        r, theta = sample_polar(params, gen, batch)
        hits += int(np.count_nonzero(_indicator(region, r, theta, params)))
        remaining -= batch
    p = hits / samples
    sample_var = p * (1.0 - p) * samples / (samples - 1)
    return MCEstimate(mean=p, std_error=math.sqrt(sample_var / samples), samples=samples)


@dataclass(frozen=True)
class ComparisonRow:
    quantity: str
    predicted: float | None
    mean: float
    min: float
    max: float
    dispersion: float
    tolerance: float | None
    status: str      # "pass" | "fail" | "reference" | "info"
    note: str = ""


@dataclass
class ComparisonTable:
    alpha: float
    C: float
    n: int
    beta: float
    seeds: tuple[int, ...]
    rows: list[ComparisonRow] = field(default_factory=list)
    errors: dict[int, str] = field(default_factory=dict)

    def passed(self) -> bool:
        return not self.errors and all(r.status != "fail" for r in self.rows)

    def to_csv_text(self) -> str:
        lines = ["quantity,predicted,mean,min,max,dispersion,tolerance,status,note"]
        for r in self.rows:
            pred = "" if r.predicted is None else f"{r.predicted:.10g}"
            tol = "" if r.tolerance is None else f"{r.tolerance:g}"
            lines.append(
                f"{r.quantity},{pred},{r.mean:.10g},{r.min:.10g},{r.max:.10g},"
                f"{r.dispersion:.6g},{tol},{r.status},{r.note}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = (f"campaign: alpha={self.alpha:g} C={self.C:g} n={self.n} "
                f"beta={self.beta:g} seeds={list(self.seeds)}")
        lines = [head, "-" * len(head)]
        width = max(len(r.quantity) for r in self.rows) if self.rows else 10
        for r in self.rows:
            pred = "--" if r.predicted is None else f"{r.predicted:.6g}"
            lines.append(
                f"{r.quantity:<{width}}  predicted={pred:<12} observed={r.mean:.6g} "
                f"[{r.min:.6g}, {r.max:.6g}]  disp={r.dispersion:.3g}  {r.status.upper()}"
                + (f"  ({r.note})" if r.note else "")
            )
        for seed, msg in sorted(self.errors.items()):
            lines.append(f"seed {seed}: ERROR {msg}")
        return "\n".join(lines) + "\n"


def _measure_one_seed(alpha: float, C: float, n: int, seed: int, beta: float,
                      k_list: tuple[int, ...], with_clustering: bool) -> dict:
    params = Params(alpha=alpha, C=C, n=n)
    coords = sample_coordinates(params, SeededStream(seed))
    g = build_bucketed(coords, params)
    hist = hstats.degree_histogram(g)
    part = hstats.partition_stats(g, beta)
    k_tail = max(1, int(round(n**0.4)))
    tails = hstats.tail_counts(hist)
    out = {
        "average_degree": hstats.average_degree(g),
        "max_degree_exponent": math.log(max(2, hstats.max_degree(g))) / math.log(n),
        "inner_count": float(part.inner_count),
        "crossing_edges": float(part.crossing_edges),
        "tail_fraction": tails.get(k_tail, 0) / n,
        "k_tail": k_tail,
    }
    for k in k_list:
        out[f"degree_fraction_{k}"] = hist.counts.get(k, 0) / n
    if with_clustering:
        out["global_clustering"] = hstats.global_clustering(g)
    return out


def campaign(params: Params, seeds, beta: float = 0.8,
             tolerances: dict | None = None,
             k_list: tuple[int, ...] = (0, 1, 2, 5, 10),
             with_clustering: bool | None = None,
             threads: int = 1) -> ComparisonTable:
    """Generate/measure/diff one replica per seed against the closed forms.

    Rows report per-quantity mean, min/max over seeds, dispersion
    (max - min)/|mean|, and pass/fail against the tolerance bands.  Failures
    of individual seeds are recorded without aborting the rest.
    """
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) < 1:
        raise ValueError("campaign needs at least one seed")
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    if with_clustering is None:
        with_clustering = params.n <= 200_000

    results: dict[int, dict] = {}
    errors: dict[int, str] = {}
    args = [(params.alpha, params.C, params.n, s, beta, k_list, with_clustering)
            for s in seeds]
    if threads > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_measure_one_seed, *a) for a in args]
            for seed, fut in zip(seeds, futures):
                try:
                    results[seed] = fut.result()
                except Exception as exc:  # per-seed isolation
                    errors[seed] = repr(exc)
    else:
        for seed, a in zip(seeds, args):
            try:
                results[seed] = _measure_one_seed(*a)
            except Exception as exc:
                errors[seed] = repr(exc)

    table = ComparisonTable(alpha=params.alpha, C=params.C, n=params.n,
                            beta=beta, seeds=seeds, errors=errors)
    if not results:
        return table

    def collect(key: str) -> np.ndarray:
        return np.array([results[s][key] for s in seeds if s in results])

    def add(quantity, values, predicted, tolerance, status, note=""):
        mean = float(np.mean(values))
        table.rows.append(ComparisonRow(
            quantity=quantity, predicted=predicted, mean=mean,
            min=float(np.min(values)), max=float(np.max(values)),
            dispersion=float((np.max(values) - np.min(values)) / abs(mean)) if mean else 0.0,
            tolerance=tolerance, status=status, note=note,
        ))

    def band_status(mean, predicted, rel_tol):
        return "pass" if abs(mean - predicted) <= rel_tol * abs(predicted) else "fail"

    avg = collect("average_degree")
    pred_avg = hpred.predicted_average_degree(params)
    add("average_degree", avg, pred_avg, tol["average_degree"],
        band_status(np.mean(avg), pred_avg, tol["average_degree"]))
    disp = float((np.max(avg) - np.min(avg)) / np.mean(avg))
    table.rows.append(ComparisonRow(
        quantity="average_degree_dispersion", predicted=None, mean=disp,
        min=disp, max=disp, dispersion=0.0,
        tolerance=tol["average_degree_dispersion"],
        status="pass" if disp <= tol["average_degree_dispersion"] else "fail",
    ))

    exponents = collect("max_degree_exponent")
    _, pred_exp = hpred.predicted_max_degree_radius_and_exponent(params)
    add("max_degree_exponent", exponents, pred_exp, tol["max_degree_exponent"],
        "pass" if abs(float(np.mean(exponents)) - pred_exp) <= tol["max_degree_exponent"]
        else "fail",
        note="tolerance is an absolute band")

    if with_clustering:
        cl = collect("global_clustering")
        floor = tol["global_clustering_floor"]
        add("global_clustering", cl, None, floor,
            "pass" if float(np.mean(cl)) > floor else "fail",
            note="theory gives a positive constant; checked against floor")

    inner = collect("inner_count")
    pred_inner = hpred.expected_inner_count(beta, params)
    factor = tol["inner_count_factor"]
    mean_inner = float(np.mean(inner))
    add("inner_count", inner, pred_inner, factor,
        "pass" if pred_inner / factor <= mean_inner <= pred_inner * factor else "fail",
        note=f"order check within factor {factor:g}")

    crossing = collect("crossing_edges")
    add("crossing_edges", crossing, hpred.expected_crossing_edges_bound(beta, params),
        None, "reference", note="bound with non-rigorous constant (K = 1)")

    for k in k_list:
        vals = collect(f"degree_fraction_{k}")
        pred = hpred.predicted_degree_fraction(k, params)
        expected_count = pred * params.n
        if expected_count >= tol["degree_fraction_min_expected"]:
            add(f"degree_fraction_{k}", vals, pred, tol["degree_fraction"],
                band_status(np.mean(vals), pred, tol["degree_fraction"]))
        else:
            add(f"degree_fraction_{k}", vals, pred, None, "info",
                note=f"expected count {expected_count:.3g} below "
                     f"{tol['degree_fraction_min_expected']:g}; not scored")

    k_tail = int(results[next(iter(results))]["k_tail"])
    tails = collect("tail_fraction")
    pred_tail = hpred.predicted_tail_fraction(k_tail, params)
    if pred_tail * params.n >= tol["tail_fraction_min_expected"]:
        add(f"tail_fraction_k{k_tail}", tails, pred_tail, tol["tail_fraction"],
            band_status(np.mean(tails), pred_tail, tol["tail_fraction"]))
    else:
        add(f"tail_fraction_k{k_tail}", tails, pred_tail, None, "info",
            note="expected tail count too small to score")
    return table
