"""Edge construction: naive all-pairs reference and a bucketed accelerator.

Both builders connect exactly the pairs at hyperbolic distance <= R and are
required to produce identical edge sets.  The bucketed variant partitions
vertices into radial bands, keeps each band sorted by angle, and for every
vertex enumerates only the angular window of each band that can possibly
contain a neighbor.  The window bound is the exact connection-angle
threshold evaluated at the band's inner radius, which dominates the
threshold of every band member; every candidate is then confirmed with the
exact distance predicate, so pruning never affects correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hrg.geometry import Params, distance
from hrg.sampling import CoordinateSet

__all__ = [
    "Graph",
    "build_naive",
    "build_bucketed",
    "write_edge_list",
    "read_edge_list",
    "EdgeListFormatError",
]

DEFAULT_NAIVE_CAP = 50_000
_CHUNK_CANDIDATES = 4_000_000


class EdgeListFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed; carries the line number."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph with optional vertex coordinates.

    ``edges`` holds each edge once as (u, v) with u < v, sorted; ``indptr``
    and ``indices`` form a CSR adjacency with neighbor lists sorted
    ascending by vertex id.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    edge_count: int
    params: Params | None = None
    coords: CoordinateSet | None = None

    @classmethod
    def from_edge_pairs(cls, n: int, u: np.ndarray, v: np.ndarray,
                        params: Params | None = None,
                        coords: CoordinateSet | None = None,
                        dedupe: bool = False) -> "Graph":
        """Build the canonical graph from arrays of endpoints (any order)."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        if lo.size and (lo.min() < 0 or hi.max() >= n):
            raise ValueError("edge endpoint outside [0, n)")
        if np.any(lo == hi):
            raise ValueError("self-loops are not allowed")
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        code = lo * np.int64(n) + hi
        if code.size and np.any(np.diff(code) <= 0):
            if not dedupe:
                raise ValueError("duplicate edges in input")
            keep = np.concatenate([[True], np.diff(code) > 0])
            lo, hi = lo[keep], hi[keep]
        edges = np.column_stack([lo, hi]) if lo.size else np.empty((0, 2), dtype=np.int64)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        adj_order = np.lexsort((dst, src))
        indices = dst[adj_order]
        degrees = np.bincount(src, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(degrees)]).astype(np.int64)
        edges.flags.writeable = False
        indptr.flags.writeable = False
        indices.flags.writeable = False
        return cls(n=n, edges=edges, indptr=indptr, indices=indices,
                   edge_count=int(lo.size), params=params, coords=coords)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < nb.size and nb[k] == v)

    def validate(self, sample_non_edges: int = 0, seed: int = 0) -> None:
        """Check structural invariants (and, with coords, the distance rule)."""
        deg = self.degrees()
        if int(deg.sum()) != 2 * self.edge_count:
            raise AssertionError("degree sum != 2 * edge_count")
        for v in range(min(self.n, 64)):
            nb = self.neighbors(v)
            if nb.size and (np.any(np.diff(nb) <= 0) or np.any(nb == v)):
                raise AssertionError(f"adjacency of {v} not strictly sorted / has self-loop")
        if self.coords is not None and self.params is not None:
            R = self.params.R
            for u, v in self.edges:
                if distance(self.coords[int(u)], self.coords[int(v)]) > R + 1e-9:
                    raise AssertionError(f"edge ({u},{v}) exceeds distance R")
            if sample_non_edges and self.n > 1:
                rng = np.random.Generator(np.random.Philox(key=seed))
                tried = 0
                while tried < sample_non_edges:
                    u, v = rng.integers(0, self.n, size=2)
                    if u == v or self.has_edge(min(u, v), max(u, v)):
                        continue
                    tried += 1
                    if distance(self.coords[int(u)], self.coords[int(v)]) <= R:
                        raise AssertionError(f"non-edge ({u},{v}) within distance R")


def _require_model_inputs(coords: CoordinateSet, params: Params) -> None:
    if len(coords) != params.n:
        raise ValueError(f"coords has {len(coords)} points but params.n = {params.n}")


def build_naive(coords: CoordinateSet, params: Params, cap: int = DEFAULT_NAIVE_CAP) -> Graph:
    """Exact O(n^2) all-pairs construction (reference implementation)."""
    _require_model_inputs(coords, params)
    n = len(coords)
    if n > cap:
        raise ValueError(f"n = {n} exceeds the naive cap {cap}")
    r, theta = coords.r, coords.theta
    cosh_r = np.cosh(r)
    sinh_r = np.sinh(r)
    cosh_R = math.cosh(params.R)

    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    block = 256
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        rows = np.arange(i0, i1)
        # pairs (i, j) with j > i only
        arg = (cosh_r[rows, None] * cosh_r[None, :]
               - sinh_r[rows, None] * sinh_r[None, :] * np.cos(theta[rows, None] - theta[None, :]))
        hit = arg <= cosh_R
        hit &= np.arange(n)[None, :] > rows[:, None]
        ii, jj = np.nonzero(hit)
        us.append(rows[ii])
        vs.append(jj.astype(np.int64))
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    return Graph.from_edge_pairs(n, u, v, params=params, coords=coords)


def _band_windows(r_query: np.ndarray, cosh_rq: np.ndarray, sinh_rq: np.ndarray,
                  y_min: float, params: Params) -> np.ndarray:
    """Connection-angle window of each query vertex against a band's inner edge.

    Equals angle_threshold_exact(r_query, y_min); inflated by one part in 1e9
    so float rounding can only widen the window (pruning stays conservative).
    """
    R = params.R
    if y_min <= 0.0:
        return np.full(r_query.shape, math.pi)
    num = cosh_rq * math.cosh(y_min) - math.cosh(R)
    den = sinh_rq * math.sinh(y_min)
    arg = np.divide(num, den, out=np.full(r_query.shape, -2.0), where=den > 0)
    w = np.where(arg <= -1.0, math.pi, np.arccos(np.clip(arg, -1.0, 1.0)))
    return np.minimum(w * (1.0 + 1e-9) + 1e-12, math.pi)


def build_bucketed(coords: CoordinateSet, params: Params, band_width: float = 1.0,
                   validate: bool = False) -> Graph:
    """Bucketed construction; edge set identical to :func:`build_naive`.

    Bands are unit-width radial shells counted from the rim (the region where
    the vertex mass concentrates); angular lookups run over per-band
    angle-sorted arrays via binary search, querying a window of the exact
    threshold evaluated at the band's inner radius.
    """
    _require_model_inputs(coords, params)
    n = len(coords)
    if n == 0:
        return Graph.from_edge_pairs(0, [], [], params=params, coords=coords)
    r, theta = coords.r, coords.theta
    R = params.R
    two_pi = 2.0 * math.pi
    cosh_R = math.cosh(R)
    cosh_r = np.cosh(r)
    sinh_r = np.sinh(r)
    phi = np.mod(theta + math.pi, two_pi)  # [0, 2pi), band arrays sort on this

    n_bands = max(1, int(math.ceil(R / band_width)))
    band = np.minimum(((R - r) / band_width).astype(np.int64), n_bands - 1)
    y_min = np.maximum(R - band_width * (np.arange(n_bands) + 1.0), 0.0)

    by_band = np.lexsort((phi, band))
    band_starts = np.searchsorted(band[by_band], np.arange(n_bands + 1))

    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    for b in range(n_bands):
        members = by_band[band_starts[b]:band_starts[b + 1]]
        if members.size == 0:
            continue
        queries = by_band[:band_starts[b + 1]]  # every vertex in bands <= b

        angles2 = np.concatenate([phi[members], phi[members] + two_pi])
        ids2 = np.concatenate([members, members])

        w = _band_windows(r[queries], cosh_r[queries], sinh_r[queries],
                          float(y_min[b]), params)
        if validate:
            band_r_min = float(r[members].min())
            true_w = _band_windows(r[queries], cosh_r[queries], sinh_r[queries],
                                   band_r_min, params)
            if np.any(true_w > w + 1e-12):
                raise AssertionError("band window narrower than a member's true threshold")
        left = np.mod(phi[queries] - w, two_pi)
        lo = np.searchsorted(angles2, left, side="left")
        hi = np.searchsorted(angles2, left + 2.0 * w, side="left")
        counts = hi - lo

        same_band = band[queries] == b
        csum = np.cumsum(counts, dtype=np.int64)
        total_candidates = int(csum[-1]) if counts.size else 0
        if total_candidates == 0:
            continue
        cuts = np.searchsorted(csum, np.arange(_CHUNK_CANDIDATES, total_candidates,
                                               _CHUNK_CANDIDATES), side="left") + 1
        bounds = np.concatenate([[0], cuts, [queries.size]])
        for k in range(bounds.size - 1):
            pos, end = int(bounds[k]), int(bounds[k + 1])
            if pos >= end:
                continue
            cnt = counts[pos:end]
            m = int(cnt.sum())
            if m == 0:
                continue
            i_rep = np.repeat(queries[pos:end], cnt)
            base = np.repeat(lo[pos:end], cnt)
            step = np.arange(m, dtype=np.int64) - np.repeat(
                np.cumsum(cnt, dtype=np.int64) - cnt, cnt)
            j_idx = ids2[base + step]
            keep = np.repeat(~same_band[pos:end], cnt) | (j_idx > i_rep)
            i_rep, j_idx = i_rep[keep], j_idx[keep]
            arg = (cosh_r[i_rep] * cosh_r[j_idx]
                   - sinh_r[i_rep] * sinh_r[j_idx] * np.cos(theta[i_rep] - theta[j_idx]))
            hit = arg <= cosh_R
            us.append(i_rep[hit])
            vs.append(j_idx[hit])

    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    return Graph.from_edge_pairs(n, u, v, params=params, coords=coords)


def write_edge_list(graph: Graph, path) -> None:
    """One edge per line as ``u v`` with u < v, sorted, LF line endings."""
    with open(path, "w", newline="\n") as fh:
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path, n: int | None = None,
                   params: Params | None = None,
                   coords: CoordinateSet | None = None) -> Graph:
    """Parse an edge-list file into a Graph.

    Vertex count is inferred from the largest id unless ``n`` or ``coords``
    pins it.  Malformed lines raise :class:`EdgeListFormatError` with the
    offending line number.
    """
    us: list[int] = []
    vs: list[int] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListFormatError(path, lineno,
                                          f"expected 'u v', got {stripped!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListFormatError(path, lineno,
                                          f"non-integer vertex id in {stripped!r}") from None
            if a < 0 or b < 0:
                raise EdgeListFormatError(path, lineno, "vertex ids must be >= 0")
            if a == b:
                raise EdgeListFormatError(path, lineno, f"self-loop at vertex {a}")
            us.append(a)
            vs.append(b)
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    if coords is not None:
        n = len(coords)
    elif n is None:
        n = int(max(u.max(initial=-1), v.max(initial=-1)) + 1) if u.size else 0
    return Graph.from_edge_pairs(n, u, v, params=params, coords=coords, dedupe=True)
