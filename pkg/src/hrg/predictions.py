"""Closed-form theoretical values for the model's degree structure.

The degree-k fraction involves the upper incomplete gamma function at a
shifted, possibly negative argument: the limit law reads

    f_k = (2 alpha e^{-alpha C} / k!) * A^{2 alpha} * Gamma(k - 2 alpha, xi)

with A = 2 alpha / (pi (alpha - 1/2)) and xi = A e^{-C/2}.  For k <= 2 alpha
the two textbook pieces Gamma(k - 2 alpha) and the lower integral are
individually divergent; their difference is exactly Gamma(a, x) with x > 0,
which is finite for every real a, so that is what gets computed here.

Summing f_k over all k >= 0 telescopes to exactly 1, which the test suite
exploits as a strong self-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import special

from hrg.geometry import Params, measure_ball_origin

__all__ = [
    "PredictionReport",
    "RestrictedDegreeExpectation",
    "upper_incomplete_gamma",
    "xi_parameter",
    "predicted_degree_fraction",
    "predicted_tail_fraction",
    "predicted_average_degree",
    "expected_degree_at_radius",
    "predicted_max_degree_radius_and_exponent",
    "degree_k_radius",
    "expected_restricted_degree_count",
    "expected_restricted_degree_count_exact",
    "expected_inner_count",
    "expected_crossing_edges_bound",
    "build_prediction_report",
]

PREDICTION_SCHEMA_VERSION = 1

# switch to log-space evaluation of Gamma(a, xi)/k! above this a = k - 2*alpha
_LOG_SPACE_THRESHOLD = 30.0


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt for any real a, x > 0.

    For a > 1 this delegates to the regularized form Q(a, x)*Gamma(a)
    (series/continued-fraction evaluation).  For a <= 1 the downward
    recurrence Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a walks down from
    a starting point in (1, 2]; whenever the recurrence passes through
    a = 0 (within 1e-12) the exponential integral E_1(x) takes over.
    """
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    if a > 1.0:
        return float(special.gammaincc(a, x) * special.gamma(a))
    steps = int(math.ceil(1.0 - a))
    top = a + steps  # in (1, 2]
    g = float(special.gammaincc(top, x) * special.gamma(top))
    for j in range(steps - 1, -1, -1):
        b = a + j
        if abs(b) < 1e-12:
            g = float(special.exp1(x))
        else:
            g = (g - x**b * math.exp(-x)) / b
    return g


def _amplitude(params: Params) -> float:
    """A = 2 alpha / (pi (alpha - 1/2)), the recurring prefactor."""
    return 2.0 * params.alpha / (math.pi * (params.alpha - 0.5))


def xi_parameter(params: Params) -> float:
    """xi = A * e^{-C/2}, the lower cut of the incomplete-gamma integral."""
    return _amplitude(params) * math.exp(-0.5 * params.C)


def predicted_degree_fraction(k: int, params: Params) -> float:
    """Limit fraction of vertices of degree exactly k."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    alpha, c = params.alpha, params.C
    amp = _amplitude(params)
    xi = xi_parameter(params)
    a = k - 2.0 * alpha
    if a <= _LOG_SPACE_THRESHOLD:
        return (2.0 * alpha * math.exp(-alpha * c) * amp ** (2.0 * alpha)
                * upper_incomplete_gamma(a, xi) / math.factorial(k))
    # large k: Gamma(a, xi)/k! underflows piecewise, so assemble in log space
    log_f = (math.log(2.0 * alpha) - alpha * c + 2.0 * alpha * math.log(amp)
             + special.gammaln(a) + math.log(special.gammaincc(a, xi))
             - special.gammaln(k + 1.0))
    return float(math.exp(log_f))


def predicted_tail_fraction(k: int, params: Params) -> float:
    """Limit fraction of vertices of degree at least k (pure power law)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    alpha = params.alpha
    return (_amplitude(params) ** (2.0 * alpha)
            * math.exp(-alpha * params.C) * float(k) ** (-2.0 * alpha))


def predicted_average_degree(params: Params) -> float:
    """Limit average degree 2 alpha^2 e^{-C/2} / (pi (alpha - 1/2)^2)."""
    alpha = params.alpha
    return 2.0 * alpha**2 * math.exp(-0.5 * params.C) / (math.pi * (alpha - 0.5) ** 2)


def expected_degree_at_radius(r: float, params: Params) -> float:
    """Expected degree (n-1) * 2 alpha e^{-r/2} / (pi (alpha - 1/2)) of a vertex at radius r."""
    if not 0.0 <= r <= params.R:
        raise ValueError(f"r = {r} outside [0, R = {params.R}]")
    return (params.n - 1) * _amplitude(params) * math.exp(-0.5 * r)


def predicted_max_degree_radius_and_exponent(params: Params) -> tuple[float, float]:
    """(r0, exponent): hub radius (2 - 1/alpha) ln n and max-degree exponent 1/(2 alpha)."""
    r0 = (2.0 - 1.0 / params.alpha) * math.log(params.n)
    return r0, 1.0 / (2.0 * params.alpha)


def degree_k_radius(k: float, params: Params) -> float:
    """Radius r_k at which the expected degree equals k exactly.

    r_k = 2 (ln(n-1) - ln k + ln A); inverts expected_degree_at_radius.
    """
    if not 1 <= k <= params.n - 1:
        raise ValueError(f"k = {k} outside [1, n-1 = {params.n - 1}]")
    return 2.0 * (math.log(params.n - 1) - math.log(k) + math.log(_amplitude(params)))


@dataclass(frozen=True)
class RestrictedDegreeExpectation:
    """E[D_k(beta)] together with a validity flag for the (beta, k) regime."""

    value: float
    valid: bool
    note: str = ""


def expected_restricted_degree_count(k: int, beta: float, params: Params) -> RestrictedDegreeExpectation:
    """Expected number of outer vertices with exactly k outer neighbors.

    The limit value is n * predicted_degree_fraction(k).  The regime of
    validity requires max{3/5, 1/(2 alpha)} < beta < 1 and k = o(n^delta)
    with delta = min{2(2 beta - 1), 1/2}; outside it the value is still
    reported but flagged.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    value = params.n * predicted_degree_fraction(k, params)
    beta_floor = max(0.6, 1.0 / (2.0 * params.alpha))
    notes = []
    if beta <= beta_floor:
        notes.append(f"beta = {beta} not above required floor {beta_floor:.4g}")
    delta = min(2.0 * (2.0 * beta - 1.0), 0.5)
    if delta > 0 and k > params.n**delta:
        notes.append(f"k = {k} exceeds n^delta = {params.n**delta:.4g}")
    elif delta <= 0:
        notes.append("delta <= 0; no valid k range at this beta")
    return RestrictedDegreeExpectation(value=value, valid=not notes, note="; ".join(notes))


def expected_restricted_degree_count_exact(k, beta: float, params: Params,
                                           quad_nodes: int = 300):
    """Finite-n expectation of D_k(beta) by direct integration.

    Integrates n * Bin(n-1, qbar_r; k) p(r) over r in [beta R, R], where
    qbar_r is the quadrature mass of (B_r ∩ B_0) \\ B_0(beta R).  This is the
    value the asymptotic formula approaches; at moderate n the suppression
    factor 1 - e^{-(alpha-1/2)(1-beta)R} vanishes only like a small negative
    power of n, so the two can differ by tens of percent.  Accepts a single
    degree or a sequence (the radial grid is shared across degrees).
    """
    from scipy import special as _sp
    from hrg.geometry import measure_intersection_quadrature

    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    n, R, a = params.n, params.R, params.alpha
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    lo, hi = beta * R, R
    rs = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * weights
    qbar = np.array([measure_intersection_quadrature(r, beta * R, params, tol=1e-12)
                     for r in rs])
    pr = a * np.sinh(a * rs) / (math.cosh(a * R) - 1.0)

    def one(kk: int) -> float:
        log_pmf = (_sp.gammaln(n) - _sp.gammaln(kk + 1) - _sp.gammaln(n - kk)
                   + kk * np.log(qbar) + (n - 1 - kk) * np.log1p(-qbar))
        return float(n * np.sum(w * np.exp(log_pmf) * pr))

    if np.isscalar(k):
        return one(int(k))
    return {int(kk): one(int(kk)) for kk in k}


def expected_inner_count(beta: float, params: Params) -> float:
    """Expected number of vertices with radius <= beta*R."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return params.n * measure_ball_origin(beta * params.R, params)


def expected_crossing_edges_bound(beta: float, params: Params) -> float:
    """Order-of-magnitude bound n^{1-(2 alpha - 1)(1 - beta)} ln n on inner-outer edges.

    The constant in front is not rigorous (reported with K = 1); use only as
    a reference scale, never as a sharp prediction.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    exponent = 1.0 - (2.0 * params.alpha - 1.0) * (1.0 - beta)
    return params.n**exponent * math.log(params.n)


@dataclass
class PredictionReport:
    """JSON-serializable bundle of closed-form predictions.

    Keys mirror the StatsReport counterparts (average_degree, etc.) so the
    two reports diff mechanically.
    """

    schema_version: int
    alpha: float
    C: float
    n: int
    R: float
    average_degree: float
    xi: float
    max_degree_exponent: float
    r0: float
    degree_fraction: dict[int, float]
    tail_fraction: dict[int, float]
    r_k: dict[int, float]
    expected_inner: dict[float, float]
    expected_crossing_bound: dict[float, float]
    expected_Dk: dict[float, dict[int, float]]
    crossing_bound_note: str = "reference only: constant factor non-rigorous (K = 1)"

    def to_json(self) -> str:
        payload = asdict(self)
        for key in ("degree_fraction", "tail_fraction", "r_k"):
            payload[key] = {str(k): v for k, v in payload[key].items()}
        for key in ("expected_inner", "expected_crossing_bound"):
            payload[key] = {f"{b:g}": v for b, v in payload[key].items()}
        payload["expected_Dk"] = {
            f"{b:g}": {str(k): v.value if isinstance(v, RestrictedDegreeExpectation) else v
                       for k, v in inner.items()}
            for b, inner in payload["expected_Dk"].items()
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PredictionReport":
        raw = json.loads(text)
        for key in ("degree_fraction", "tail_fraction", "r_k"):
            raw[key] = {int(k): v for k, v in raw[key].items()}
        for key in ("expected_inner", "expected_crossing_bound"):
            raw[key] = {float(b): v for b, v in raw[key].items()}
        raw["expected_Dk"] = {
            float(b): {int(k): v for k, v in inner.items()}
            for b, inner in raw["expected_Dk"].items()
        }
        return cls(**raw)


def build_prediction_report(params: Params, k_max: int = 50,
                            betas: tuple[float, ...] = (0.8,),
                            tail_ks: tuple[int, ...] | None = None) -> PredictionReport:
    r0, exponent = predicted_max_degree_radius_and_exponent(params)
    ks = range(k_max + 1)
    if tail_ks is None:
        tail_ks = tuple(sorted({1, 2, 5, 10, 20, 50, 100, max(1, int(params.n**0.4))}))
    rk_ks = [k for k in (1, 2, 5, 10, 100, 1000) if k <= params.n - 1]
    return PredictionReport(
        schema_version=PREDICTION_SCHEMA_VERSION,
        alpha=params.alpha,
        C=params.C,
        n=params.n,
        R=params.R,
        average_degree=predicted_average_degree(params),
        xi=xi_parameter(params),
        max_degree_exponent=exponent,
        r0=r0,
        degree_fraction={k: predicted_degree_fraction(k, params) for k in ks},
        tail_fraction={k: predicted_tail_fraction(k, params) for k in tail_ks},
        r_k={k: degree_k_radius(k, params) for k in rk_ks},
        expected_inner={b: expected_inner_count(b, params) for b in betas},
        expected_crossing_bound={b: expected_crossing_edges_bound(b, params) for b in betas},
        expected_Dk={
            b: {k: expected_restricted_degree_count(k, b, params).value for k in range(11)}
            for b in betas
        },
    )
