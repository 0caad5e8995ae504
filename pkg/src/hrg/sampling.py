"""Seeded, reproducible sampling of vertex coordinates.

Radii follow the density alpha*sinh(alpha*r)/(cosh(alpha*R) - 1) on [0, R],
drawn by inverse-transform sampling; angles are uniform on (-pi, pi].
All draws come from a Philox counter-based generator, whose bit stream is
fixed by numpy for a given seed independently of platform and thread count,
so identical (seed, params) always reproduce identical coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hrg.geometry import Params, PolarPoint

__all__ = [
    "SeededStream",
    "CoordinateSet",
    "radial_cdf",
    "sample_radius",
    "sample_coordinates",
    "write_coordinates_csv",
    "read_coordinates_csv",
]

_ALGORITHM = "philox4x64"


@dataclass(frozen=True)
class SeededStream:
    """Factory for deterministic uniform streams.

    ``generator()`` always restarts the stream from the beginning, so every
    consumer of a SeededStream sees the same sequence u_0, u_1, ... of
    float64 values in [0, 1).
    """

    seed: int
    algorithm: str = _ALGORITHM

    def __post_init__(self):
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer (got {self.seed!r})")
        if self.algorithm != _ALGORITHM:
            raise ValueError(f"unsupported stream algorithm {self.algorithm!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed))

    def uniforms(self, count: int) -> np.ndarray:
        """First ``count`` stream values, in [0, 1)."""
        return self.generator().random(count)


def radial_cdf(r, params: Params):
    """CDF (cosh(alpha r) - 1)/(cosh(alpha R) - 1) of the radial density."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(r_arr > params.R):
        raise ValueError(f"radius outside [0, R = {params.R}]")
    a = params.alpha
    out = (np.cosh(a * r_arr) - 1.0) / (math.cosh(a * params.R) - 1.0)
    return float(out) if out.ndim == 0 else out


def sample_radius(u, params: Params):
    """Inverse radial CDF: u in [0, 1) -> radius in [0, R)."""
    u_arr = np.asarray(u, dtype=float)
    a = params.alpha
    out = np.arccosh(1.0 + u_arr * (math.cosh(a * params.R) - 1.0)) / a
    return float(out) if out.ndim == 0 else out


class CoordinateSet:
    """Ordered, immutable sequence of n polar points, stored as arrays."""

    __slots__ = ("r", "theta")

    def __init__(self, r: np.ndarray, theta: np.ndarray):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if r.shape != theta.shape or r.ndim != 1:
            raise ValueError("r and theta must be 1-D arrays of equal length")
        self.r = r
        self.r.flags.writeable = False
        self.theta = theta
        self.theta.flags.writeable = False

    def __len__(self) -> int:
        return self.r.shape[0]

    def __getitem__(self, i: int) -> PolarPoint:
        return PolarPoint(float(self.r[i]), float(self.theta[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoordinateSet):
            return NotImplemented
        return np.array_equal(self.r, other.r) and np.array_equal(self.theta, other.theta)


def _uniform_pairs_to_polar(u: np.ndarray, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Map an even-length uniform block to (radii, angles).

    Element 2i feeds the radius of point i, element 2i+1 its angle.  The raw
    angle pi*(2u - 1) lands in [-pi, pi); the single excluded endpoint -pi is
    folded to +pi to match the (-pi, pi] convention.
    """
    r = sample_radius(u[0::2], params)
    theta = math.pi * (2.0 * u[1::2] - 1.0)
    theta[theta <= -math.pi] = math.pi
    return r, theta


def sample_polar(params: Params, gen: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` model-distributed points from an already-open generator."""
    return _uniform_pairs_to_polar(gen.random(2 * count), params)


def sample_coordinates(params: Params, stream: SeededStream) -> CoordinateSet:
    """Coordinates for all n vertices of the model, in vertex order."""
    r, theta = sample_polar(params, stream.generator(), params.n)
    return CoordinateSet(r, theta)


def write_coordinates_csv(coords: CoordinateSet, path) -> None:
    """Write ``vertex_id,r,theta`` rows with 17-significant-digit floats."""
    with open(path, "w", newline="\n") as fh:
        fh.write("vertex_id,r,theta\n")
        for i in range(len(coords)):
            fh.write(f"{i},{coords.r[i]:.17g},{coords.theta[i]:.17g}\n")


def read_coordinates_csv(path) -> CoordinateSet:
    """Read a coordinate CSV produced by :func:`write_coordinates_csv`."""
    rs: list[float] = []
    thetas: list[float] = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "vertex_id,r,theta":
            raise ValueError(f"{path}: unexpected coordinate CSV header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 comma-separated fields")
            idx, r, theta = parts
            if int(idx) != len(rs):
                raise ValueError(f"{path}:{lineno}: vertex ids must be consecutive from 0")
            rs.append(float(r))
            thetas.append(float(theta))
    return CoordinateSet(np.array(rs), np.array(thetas))
