from __future__ import annotations

import numpy as np
import pytest

from cutflip.instance import Max2LinInstance, parse_instance

TRIANGLE_TEXT = "3 3\n0 1 -1 1\n0 2 -1 1\n1 2 -1 1"
SINGLE_EDGE_TEXT = "2 1\n0 1 -1 1.0"
FIVE_CYCLE_TEXT = "5 5\n0 1 -1 1\n1 2 -1 1\n2 3 -1 1\n3 4 -1 1\n0 4 -1 1"


@pytest.fixture
def triangle() -> Max2LinInstance:
    """Unit Max-Cut triangle: the smallest instance with a binding triangle
    inequality (OPT = 2, plain SDP value = 2.25)."""
    return parse_instance(TRIANGLE_TEXT)


@pytest.fixture
def single_edge() -> Max2LinInstance:
    return parse_instance(SINGLE_EDGE_TEXT)


@pytest.fixture
def five_cycle() -> Max2LinInstance:
    return parse_instance(FIVE_CYCLE_TEXT)


def random_instance(rng: np.random.Generator, n: int, avg_deg: float = 3.0) -> Max2LinInstance:
    """Erdos-Renyi-ish signed weighted instance with at least one edge.

    Weights are dyadic rationals (k/8) so reordered float sums stay exact.
    """
    edges = []
    p = min(1.0, avg_deg / max(n - 1, 1))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = (1 + int(rng.integers(1, 16))) / 8.0
                b = -1 if rng.random() < 0.7 else 1
                edges.append((i, j, b, w))
    if not edges:
        edges.append((0, 1, -1, 1.0))
    return Max2LinInstance.from_edges(n, edges)
