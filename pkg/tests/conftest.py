import math

import numpy as np
import pytest

from hrg import Params, SeededStream, sample_coordinates, build_bucketed
from hrg.generator import Graph


def params_for_radius(R: float, alpha: float = 0.75, n: int = 1000) -> Params:
    """Params with an exact target disk radius (C absorbs the difference)."""
    return Params(alpha=alpha, C=R - 2.0 * math.log(n), n=n)


def make_instance(alpha: float, C: float, n: int, seed: int):
    params = Params(alpha=alpha, C=C, n=n)
    coords = sample_coordinates(params, SeededStream(seed))
    return params, coords


def graph_from_edges(n: int, edges) -> Graph:
    u = np.array([e[0] for e in edges], dtype=np.int64)
    v = np.array([e[1] for e in edges], dtype=np.int64)
    return Graph.from_edge_pairs(n, u, v)


@pytest.fixture(scope="session")
def triangle() -> Graph:
    return graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture(scope="session")
def small_instance():
    """One modest generated graph shared by read-only tests."""
    params, coords = make_instance(0.75, 0.0, 2000, seed=99)
    return build_bucketed(coords, params)
