"""Numeric kernel for the hyperbolic disk model.

Distances use the native polar representation, where the radial coordinate
of a point equals its hyperbolic distance from the disk center:

    cosh(d) = cosh(r) cosh(r') - sinh(r) sinh(r') cos(dtheta)

Region measures are taken under the model's point density
f(y) = alpha*sinh(alpha*y) / (2*pi*(cosh(alpha*R) - 1)), which integrates
to 1 over the disk of radius R.  Exact closed forms, leading-order
approximations, and adaptive quadrature are all provided so each can be
validated against the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "Params",
    "PolarPoint",
    "QuadratureError",
    "distance",
    "distance_arrays",
    "angle_threshold_exact",
    "angle_threshold_approx",
    "measure_ball_origin",
    "measure_intersection_quadrature",
    "measure_intersection_approx",
    "double_intersection_regime",
]

# cosh overflows float64 near 710; reject parameter combinations that would
# push cosh(alpha*R) out of range.
_MAX_ALPHA_R = 700.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class Params:
    """Model parameters (alpha, C, n) with derived disk radius R = 2 ln n + C.

    alpha must exceed 1/2 strictly; below that the degree sequence is too
    heavy-tailed for the model to have bounded average degree.
    """

    alpha: float
    C: float
    n: int
    R: float = field(init=False)

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise ValueError(f"alpha must be > 1/2 (got {self.alpha})")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer (got {self.n!r})")
        R = 2.0 * math.log(self.n) + self.C
        if not R > 0:
            raise ValueError(f"disk radius R = 2 ln n + C = {R} must be positive")
        if self.alpha * R > _MAX_ALPHA_R:
            raise ValueError(
                f"alpha*R = {self.alpha * R:.1f} exceeds {_MAX_ALPHA_R}; "
                "cosh(alpha*R) would overflow double precision"
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "R", R)


def _normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    t = math.fmod(theta + math.pi, 2.0 * math.pi)
    if t <= 0.0:
        t += 2.0 * math.pi
    return t - math.pi


@dataclass(frozen=True)
class PolarPoint:
    """A point (r, theta) of the disk; theta is normalized to (-pi, pi]."""

    r: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0.0):
            raise ValueError(f"radial coordinate must be finite and >= 0 (got {self.r})")
        if not math.isfinite(self.theta):
            raise ValueError(f"angular coordinate must be finite (got {self.theta})")
        object.__setattr__(self, "theta", _normalize_angle(self.theta))


def _angle_diff(a: float, b: float) -> float:
    """Circular angle difference reduced to [0, pi]."""
    d = math.fmod(abs(a - b), 2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def distance(p: PolarPoint, q: PolarPoint) -> float:
    """Hyperbolic distance between two points of the disk.

    The acosh argument is clamped to >= 1 before evaluation: round-off can
    push it slightly below 1 for nearly identical points, and such pairs are
    geometrically at distance ~0.
    """
    dtheta = _angle_diff(p.theta, q.theta)
    arg = math.cosh(p.r) * math.cosh(q.r) - math.sinh(p.r) * math.sinh(q.r) * math.cos(dtheta)
    if arg < 1.0:
        arg = 1.0
    return math.acosh(arg)


def distance_arrays(r1, theta1, r2, theta2):
    """Vectorized form of :func:`distance` on coordinate arrays."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    d = np.abs(np.asarray(theta1, dtype=float) - np.asarray(theta2, dtype=float)) % (2.0 * np.pi)
    dtheta = np.minimum(d, 2.0 * np.pi - d)
    arg = np.cosh(r1) * np.cosh(r2) - np.sinh(r1) * np.sinh(r2) * np.cos(dtheta)
    return np.arccosh(np.maximum(arg, 1.0))


def angle_threshold_exact(r, y, params: Params):
    """Largest angular separation theta_r(y) with d(r, y, theta) <= R.

    Exact form: arccos((cosh r cosh y - cosh R) / (sinh r sinh y)), with the
    argument clamped to [-1, 1].  Whenever the raw argument is <= -1
    (equivalently r + y <= R) the whole circle qualifies and pi is returned;
    the same holds at r = 0 or y = 0, where the separation from the disk
    center is at most R by construction.

    Accepts scalars or numpy arrays (broadcast together).
    """
    R = params.R
    r_arr = np.asarray(r, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if np.any(r_arr < 0) or np.any(r_arr > R) or np.any(y_arr < 0) or np.any(y_arr > R):
        raise ValueError("angle_threshold_exact requires 0 <= r, y <= R")

    sr = np.sinh(r_arr) * np.sinh(y_arr)
    num = np.cosh(r_arr) * np.cosh(y_arr) - math.cosh(R)
    # sr == 0 exactly when r == 0 or y == 0; force the pi branch there.
    arg = np.divide(num, sr, out=np.full(np.broadcast(r_arr, y_arr).shape, -2.0), where=sr > 0)
    out = np.where(arg <= -1.0, np.pi, np.arccos(np.clip(arg, -1.0, 1.0)))
    if out.ndim == 0:
        return float(out)
    return out


def angle_threshold_approx(r, y, params: Params):
    """Leading-order threshold 2*exp((R - r - y)/2), valid for y >= R - r."""
    R = params.R
    r_arr = np.asarray(r, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < R - r_arr):
        raise ValueError("angle_threshold_approx requires y >= R - r")
    out = 2.0 * np.exp(0.5 * (R - r_arr - y_arr))
    if out.ndim == 0:
        return float(out)
    return out


def measure_ball_origin(x: float, params: Params) -> float:
    """Exact mass (cosh(alpha x) - 1) / (cosh(alpha R) - 1) of the central ball of radius x."""
    if not 0.0 <= x <= params.R:
        raise ValueError(f"x = {x} outside [0, R = {params.R}]")
    a = params.alpha
    return (math.cosh(a * x) - 1.0) / (math.cosh(a * params.R) - 1.0)


def radial_density(y, params: Params):
    """Model radial density alpha*sinh(alpha*y)/(cosh(alpha*R) - 1)."""
    a = params.alpha
    return a * np.sinh(a * np.asarray(y, dtype=float)) / (math.cosh(a * params.R) - 1.0)


def measure_intersection_quadrature(r: float, x: float, params: Params, tol: float = 1e-9) -> float:
    """Mass of (B_r(R) ∩ B_0(R)) \\ B_0(x) by adaptive quadrature.

    Integrates (1/pi) * theta_r(y) * alpha*sinh(alpha*y)/(cosh(alpha*R) - 1)
    over y in [x, R].  The integrand has a kink at y = R - r where the
    threshold comes off the pi branch, so the quadrature is told to split
    there.  Setting x = 0 yields the plain intersection mass
    mu(B_r(R) ∩ B_0(R)); absolute error is bounded by ``tol``.
    """
    R = params.R
    if not 0.0 <= r <= R:
        raise ValueError(f"r = {r} outside [0, R = {R}]")
    if not 0.0 <= x <= R:
        raise ValueError(f"x = {x} outside [0, R = {R}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if x >= R:
        return 0.0

    a = params.alpha
    norm = math.cosh(a * R) - 1.0

    def integrand(y: float) -> float:
        th = angle_threshold_exact(r, y, params)
        return th * a * math.sinh(a * y) / (math.pi * norm)

    kink = R - r
    points = [kink] if x < kink < R else None
    value, abserr, info, *tail = integrate.quad(
        integrand, x, R, points=points, epsabs=0.5 * tol, epsrel=1e-12, limit=200, full_output=1
    )
    if tail or abserr > tol:
        raise QuadratureError(
            f"quadrature for (r={r}, x={x}) did not converge: "
            f"estimated error {abserr:.3e} > tol {tol:.3e}"
        )
    return value


def measure_intersection_approx(r: float, x: float, params: Params) -> float:
    """Leading-order mass of (B_r(R) ∩ B_0(R)) \\ B_0(x).

    For x <= R - r the exclusion is asymptotically negligible and the value
    is 2*alpha*e^{-r/2} / (pi*(alpha - 1/2)); beyond that the same prefactor
    is damped by 1 - (1 + ((alpha-1/2)/(alpha+1/2)) e^{-2 alpha x}) e^{-(alpha-1/2)(R-x)}.
    Outside its validity regime the formula can dip below zero; the result is
    clamped at 0.
    """
    R = params.R
    if not 0.0 <= r <= R:
        raise ValueError(f"r = {r} outside [0, R = {R}]")
    if not 0.0 <= x <= R:
        raise ValueError(f"x = {x} outside [0, R = {R}]")
    a = params.alpha
    lead = 2.0 * a * math.exp(-0.5 * r) / (math.pi * (a - 0.5))
    if x <= R - r:
        return lead
    damp = 1.0 - (1.0 + (a - 0.5) / (a + 0.5) * math.exp(-2.0 * a * x)) * math.exp(
        -(a - 0.5) * (R - x)
    )
    return max(0.0, lead * damp)


def double_intersection_regime(r1: float, r2: float, theta: float) -> bool:
    """True iff 0 <= theta <= e^{-r2/2} - e^{-r1/2} (requires r1 >= r2).

    In this regime the ball around the second point covers the relevant
    angular range of the first entirely, so the triple intersection
    B_0 ∩ B_{r1,0} ∩ B_{r2,theta} \\ B_0(x) collapses to B_0 ∩ B_{r1} \\ B_0(x).
    """
    if r1 < r2:
        raise ValueError(f"requires r1 >= r2 (got r1={r1}, r2={r2})")
    return 0.0 <= theta <= math.exp(-0.5 * r2) - math.exp(-0.5 * r1)
