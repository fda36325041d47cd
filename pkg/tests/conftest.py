"""Shared fixture graphs with independently derived expected values.

Frozen values come from hand computation or the brute-force oracles in
``oracles.py``; each is noted next to its fixture.
"""
from __future__ import annotations

import numpy as np
import pytest

from asymembed.graph_core import Graph


def petersen() -> Graph:
    # outer C5, inner pentagram, spokes
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes, d=3)


def complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], d=n - 1)


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], d=2)


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def two_triangles_shared_edge() -> Graph:
    # vertices 0..3; triangles 0-1-2 and 0-1-3 share edge (0,1)
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])


@pytest.fixture
def g_petersen() -> Graph:
    return petersen()


@pytest.fixture
def g_k4() -> Graph:
    return complete(4)


@pytest.fixture
def g_c6() -> Graph:
    return cycle(6)


@pytest.fixture
def g_path5() -> Graph:
    return path(5)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260822)


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = rng.random(len(pairs)) < p
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])
