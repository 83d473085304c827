import numpy as np
import pytest

from netbone.graph import Graph, is_connected


def build(labels, pairs):
    return Graph.from_edges(list(labels), pairs)


@pytest.fixture
def p4():
    """Path 0-1-2-3."""
    return build("0123", [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def star():
    """Star with center 0 and leaves 1, 2, 3."""
    return build("0123", [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def triangle():
    return build("012", [(0, 1), (0, 2), (1, 2)])


def random_connected_graph(rng, n, p=0.45):
    """Random simple connected graph on n vertices."""
    while True:
        pairs = [
            (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
        ]
        if not pairs:
            continue
        g = build([str(i) for i in range(n)], pairs)
        if is_connected(g, range(n)):
            return g
