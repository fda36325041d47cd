"""Deterministic graph constructions: named small graphs and planted
short-cycle families for exercising the decomposition verifier."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph_core import DomainError, Graph


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], d=n - 1)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError(f"cycle needs >= 3 vertices, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], d=2)


def path_graph(n: int) -> Graph:
    if n < 1:
        raise DomainError(f"path needs >= 1 vertex, got {n}")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes, d=3)


def shared_edge_triangles() -> Graph:
    """Two triangles glued along an edge; deleting one edge per triangle
    leaves a 4-cycle, so any girth target above 4 is violated."""
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])


def cycle_chain(
    lengths: Sequence[int],
    spacing: int,
    tails: Sequence[int] = (),
) -> Graph:
    """Cycles of the given lengths joined in a chain by paths of ``spacing``
    edges, with optional pendant paths hung off successive cycle vertices.

    Consecutive cycles sit at distance exactly ``spacing``; non-consecutive
    ones are farther.  All construction is positional, so equal arguments
    give equal graphs.
    """
    if spacing < 1:
        raise DomainError(f"spacing must be >= 1, got {spacing}")
    if not lengths:
        raise DomainError("need at least one cycle")
    for ln in lengths:
        if ln < 3:
            raise DomainError(f"cycle length must be >= 3, got {ln}")
    edges: list[tuple[int, int]] = []
    starts: list[int] = []
    nxt = 0
    for ln in lengths:
        starts.append(nxt)
        edges.extend((nxt + i, nxt + (i + 1) % ln) for i in range(ln))
        nxt += ln
    for a, b in zip(starts, starts[1:]):
        # connector path of `spacing` edges between anchor vertices a and b
        prev = a
        for _ in range(spacing - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, b))
    for k, tail_len in enumerate(tails):
        if tail_len < 1:
            raise DomainError(f"tail length must be >= 1, got {tail_len}")
        anchor = starts[k % len(starts)] + 1 + (k // len(starts)) % lengths[k % len(starts)]
        prev = anchor
        for _ in range(tail_len):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Graph.from_edges(nxt, edges)


def planted_corpus(
    count: int,
    threshold: int,
    seed: int,
    valid: bool = True,
) -> list[Graph]:
    """Reproducible variety of planted graphs for a cycle threshold.

    ``valid=True``: cycle lengths in [3, threshold), pairwise separation at
    least ``threshold``.  ``valid=False``: each graph carries a planted
    defect, alternating between under-spaced cycles and glued triangles.
    """
    if threshold < 4:
        raise DomainError(f"threshold must be >= 4 so a short cycle exists, got {threshold}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed)))
    out: list[Graph] = []
    for k in range(count):
        num = int(rng.integers(2, 5))
        lengths = [int(rng.integers(3, threshold)) for _ in range(num)]
        tails = tuple(int(rng.integers(1, threshold + 2)) for _ in range(int(rng.integers(0, 3))))
        if valid:
            spacing = threshold + int(rng.integers(0, 3))
            out.append(cycle_chain(lengths, spacing, tails))
            continue
        if k % 2 == 0 and threshold >= 5:
            # glued triangles: pruning one edge per triangle leaves a 4-cycle
            base = shared_edge_triangles()
            extra = list(base.edges)
            prev = 2
            nxt = 4
            for _ in range(int(rng.integers(threshold, threshold + 3))):
                extra.append((prev, nxt))
                prev = nxt
                nxt += 1
            out.append(Graph.from_edges(nxt, extra))
        else:
            spacing = max(1, threshold - 1 - int(rng.integers(0, 2)))
            out.append(cycle_chain(lengths, spacing, tails))
    return out
