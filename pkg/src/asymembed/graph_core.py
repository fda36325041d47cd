"""Graph primitives: edge-list parsing, shortest-path metrics, short-cycle
enumeration, and density / expansion diagnostics.

Vertices are integers ``0..n-1``.  Graphs are simple (no loops, no parallel
edges) and undirected.  Disconnected inputs are allowed; distances across
components are ``math.inf``.  Everything here is deterministic: adjacency is
iterated in sorted order and all search frontiers are queue-ordered.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

INFINITY = math.inf


class GraphFormatError(ValueError):
    """Malformed edge-list text."""


class DomainError(ValueError):
    """Operation called outside its supported domain."""


# ---------------------------------------------------------------------------
# core types


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    ``d`` optionally declares the graph regular of that degree; the
    declaration is validated at construction time.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    d: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"need at least one vertex, got n={self.n}")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                if u == v:
                    raise DomainError(f"loop at vertex {u}")
                raise DomainError(f"edge ({u},{v}) not normalized in range 0..{self.n - 1}")
        if self.d is not None:
            bad = [v for v, k in enumerate(self.degrees) if k != self.d]
            if bad:
                raise DomainError(
                    f"declared degree {self.d} but vertex {bad[0]} has degree {self.degrees[bad[0]]}"
                )

    @staticmethod
    def from_edges(n: int, pairs: Iterable[tuple[int, int]], d: int | None = None) -> "Graph":
        """Normalize unordered pairs and build a graph."""
        norm = set()
        for u, v in pairs:
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return Graph(n=n, edges=frozenset(norm), d=d)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbr: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.edges):
            nbr[u].append(v)
            nbr[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbr)

    @cached_property
    def max_degree(self) -> int:
        return max(self.degrees) if self.n else 0

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def is_regular(self, d: int | None = None) -> bool:
        degs = set(self.degrees)
        if len(degs) != 1:
            return False
        return True if d is None else degs == {d}

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    queue.append(y)
        return count == self.n

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph relabeled to ``0..k-1``; returns (graph, sorted originals)."""
        keep = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(keep)}
        sub = {
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        }
        return Graph(n=len(keep), edges=frozenset(sub)), keep

    def remove_edges(self, gone: Iterable[tuple[int, int]]) -> "Graph":
        drop = {(min(u, v), max(u, v)) for u, v in gone}
        return Graph(n=self.n, edges=self.edges - drop)

    def sparse_adjacency(self) -> sp.csr_matrix:
        if not self.edges:
            return sp.csr_matrix((self.n, self.n), dtype=np.int64)
        us, vs = zip(*self.edges)
        rows = np.array(us + vs)
        cols = np.array(vs + us)
        data = np.ones(len(rows), dtype=np.int64)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


def parse_graph(text: str, strict: bool = False) -> Graph:
    """Parse edge-list text: a header line ``n m`` then ``m`` lines ``u v``.

    Repeated edges are collapsed with a warning, or rejected when
    ``strict=True``.  Loops and out-of-range endpoints are always rejected.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"header must be two integers, got {lines[0]!r}") from exc
    if n < 1 or m < 0:
        raise GraphFormatError(f"bad header values n={n} m={m}")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header declares {m} edges but {len(lines) - 1} lines follow")
    edges: set[tuple[int, int]] = set()
    for ln_no, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {ln_no}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {ln_no}: expected integers, got {ln!r}") from exc
        if u == v:
            raise GraphFormatError(f"line {ln_no}: loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {ln_no}: endpoint out of range 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in edges:
            if strict:
                raise GraphFormatError(f"line {ln_no}: duplicate edge {e}")
            warnings.warn(f"duplicate edge {e} collapsed", stacklevel=2)
            continue
        edges.add(e)
    return Graph(n=n, edges=frozenset(edges))


def serialize_graph(g: Graph) -> str:
    """Inverse of :func:`parse_graph`; edges emitted in sorted order."""
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# shortest-path metric


@dataclass(frozen=True)
class MetricTable:
    """All-pairs shortest-path distances, ``inf`` across components."""

    n: int
    dist: np.ndarray

    def distance(self, x: int, y: int) -> float:
        return float(self.dist[x, y])

    def diameter(self) -> float:
        return float(self.dist.max())

    def eccentricity(self, x: int) -> float:
        return float(self.dist[x].max())

    def ball(self, x: int, radius: float) -> tuple[int, ...]:
        """Closed ball: vertices within ``radius`` of ``x``."""
        return tuple(int(v) for v in np.flatnonzero(self.dist[x] <= radius))

    def set_ball(self, centers: Iterable[int], radius: float) -> tuple[int, ...]:
        idx = sorted(set(centers))
        if not idx:
            return ()
        d = self.dist[idx].min(axis=0)
        return tuple(int(v) for v in np.flatnonzero(d <= radius))

    def dist_to_set(self, x: int, targets: Iterable[int]) -> float:
        idx = sorted(set(targets))
        if not idx:
            return INFINITY
        return float(self.dist[x, idx].min())

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> float:
        ia, ib = sorted(set(a)), sorted(set(b))
        if not ia or not ib:
            return INFINITY
        return float(self.dist[np.ix_(ia, ib)].min())

    def farthest_pair(self) -> tuple[int, int, float]:
        flat = int(np.argmax(self.dist))
        x, y = divmod(flat, self.n)
        return x, y, float(self.dist[x, y])


def shortest_path_metric(g: Graph) -> MetricTable:
    """BFS metric of ``g`` as a dense table.

    Satisfies the metric axioms with ``d(x,y)=1`` exactly on edges; verified
    property-style in the test suite rather than at construction time.
    """
    dist = csgraph.shortest_path(g.sparse_adjacency(), method="D", unweighted=True)
    dist.flags.writeable = False
    return MetricTable(n=g.n, dist=dist)


# ---------------------------------------------------------------------------
# short cycles

MAX_CYCLE_THRESHOLD = 64


@dataclass(frozen=True)
class CycleSet:
    """Vertex sets supporting a cycle shorter than ``threshold``.

    Cycles are identified with their vertex sets; ``witnesses`` holds one
    cyclic order per set, canonicalized to the lexicographically smallest
    rotation/reflection, sorted.
    """

    threshold: int
    witnesses: tuple[tuple[int, ...], ...]

    @cached_property
    def vertex_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(w) for w in self.witnesses)

    @property
    def count(self) -> int:
        return len(self.witnesses)

    def validate(self, g: Graph) -> None:
        seen = set()
        for w in self.witnesses:
            if not (3 <= len(w) < self.threshold):
                raise DomainError(f"cycle length {len(w)} outside [3, {self.threshold})")
            if len(set(w)) != len(w):
                raise DomainError(f"repeated vertex in witness {w}")
            for i, x in enumerate(w):
                if not g.has_edge(x, w[(i + 1) % len(w)]):
                    raise DomainError(f"witness {w} missing edge at position {i}")
            fs = frozenset(w)
            if fs in seen:
                raise DomainError(f"duplicate cycle set {sorted(fs)}")
            seen.add(fs)


def enumerate_short_cycles(g: Graph, threshold: int) -> CycleSet:
    """All vertex sets carrying a cycle of length < ``threshold``.

    Rooted depth-first search: each simple cycle is generated from its
    smallest vertex, walking only through larger vertices, and closed in the
    direction that makes the witness lexicographically minimal.  Sets
    reachable by several cyclic orders (chords) are reported once.
    """
    if threshold < 3:
        raise DomainError(f"threshold must be >= 3, got {threshold}")
    if threshold > MAX_CYCLE_THRESHOLD:
        raise DomainError(f"threshold {threshold} exceeds supported {MAX_CYCLE_THRESHOLD}")
    max_len = threshold - 1
    found: dict[frozenset[int], tuple[int, ...]] = {}
    adj = g.adjacency
    for root in range(g.n):
        stack: list[int] = [root]
        on_path = {root}

        def extend() -> None:
            tip = stack[-1]
            for nxt in adj[tip]:
                if nxt == root and len(stack) >= 3:
                    # close in one direction only: second vertex < last vertex
                    if stack[1] < stack[-1]:
                        key = frozenset(stack)
                        wit = tuple(stack)
                        prev = found.get(key)
                        if prev is None or wit < prev:
                            found[key] = wit
                    continue
                if nxt <= root or nxt in on_path or len(stack) >= max_len:
                    continue
                stack.append(nxt)
                on_path.add(nxt)
                extend()
                on_path.discard(nxt)
                stack.pop()

        extend()
    witnesses = tuple(sorted(found.values()))
    cs = CycleSet(threshold=threshold, witnesses=witnesses)
    cs.validate(g)
    return cs


def _has_cycle(g: Graph) -> bool:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in sorted(g.edges):
        ru, rv = find(u), find(v)
        if ru == rv:
            return True
        parent[ru] = rv
    return False


def girth(g: Graph) -> float:
    """Length of the shortest cycle, ``inf`` for forests.

    Per-root breadth-first search, pruned at half the best length found so
    far; a non-tree edge seen at depths ``a`` and ``b`` witnesses a closed
    walk of length ``a+b+1`` which is minimized exactly at roots lying on a
    shortest cycle.
    """
    if not _has_cycle(g):
        return INFINITY
    adj = g.adjacency
    best = g.n + 1
    for root in range(g.n):
        depth = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = depth[x]
            # cheapest candidate through x is 2*dx+1 (same-depth neighbor)
            if 2 * dx + 1 >= best:
                continue
            for y in adj[x]:
                if y == parent[x]:
                    continue
                if y in depth:
                    cand = dx + depth[y] + 1
                    if cand < best:
                        best = cand
                else:
                    depth[y] = dx + 1
                    parent[y] = x
                    queue.append(y)
    return float(best)


def count_cycles(g: Graph, length: int) -> int:
    """Number of cycle vertex-sets of exactly ``length``.

    Lengths 3..5 use closed-walk traces of the sparse adjacency matrix
    (exact integer arithmetic); longer lengths fall back to enumeration.
    """
    if length < 3:
        raise DomainError(f"cycle length must be >= 3, got {length}")
    if length > 5:
        cs = enumerate_short_cycles(g, length + 1)
        return sum(1 for w in cs.witnesses if len(w) == length)
    a = g.sparse_adjacency()
    deg = np.asarray(a.sum(axis=1)).ravel()
    a2 = a @ a
    a3 = a2 @ a
    tr3 = int(a3.diagonal().sum())
    if length == 3:
        return tr3 // 6
    if length == 4:
        tr4 = int(a2.multiply(a2).sum())
        return (tr4 - 2 * int((deg * deg).sum()) + 2 * g.m) // 8
    tr5 = int(a2.multiply(a3).sum())
    diag3 = a3.diagonal()
    corr = int(((deg - 2) * diag3).sum())
    return (tr5 - 5 * tr3 - 5 * corr) // 10


# ---------------------------------------------------------------------------
# densest subgraph (maximum flow)


class _Dinic:
    """Blocking-flow max-flow on integer capacities."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.head: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for eid in self.head[x]:
                    y = self.to[eid]
                    if self.cap[eid] > 0 and level[y] < 0:
                        level[y] = level[x] + 1
                        queue.append(y)
            if level[t] < 0:
                return flow
            it = [0] * self.n
            # iterative blocking-flow augmentation
            while True:
                path: list[int] = []
                x = s
                while x != t:
                    advanced = False
                    while it[x] < len(self.head[x]):
                        eid = self.head[x][it[x]]
                        y = self.to[eid]
                        if self.cap[eid] > 0 and level[y] == level[x] + 1:
                            path.append(eid)
                            x = y
                            advanced = True
                            break
                        it[x] += 1
                    if not advanced:
                        if not path:
                            x = None
                            break
                        bad = path.pop()
                        x = self.to[bad ^ 1]
                        it[x] += 1
                if x is None:
                    break
                push = min(self.cap[eid] for eid in path)
                for eid in path:
                    self.cap[eid] -= push
                    self.cap[eid ^ 1] += push
                flow += push

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for eid in self.head[x]:
                y = self.to[eid]
                if self.cap[eid] > 0 and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen


def _denser_subset(g: Graph, q: Fraction) -> frozenset[int] | None:
    """A vertex set with |E(S)|/|S| > q, or None.

    Cut construction: source->v at m, v->sink at m + 2q - deg(v), both arcs
    of every edge at 1, all scaled by q's denominator to stay integral.
    The minimum cut drops below m*n exactly when a denser-than-q set exists.
    """
    n, m = g.n, g.m
    b = q.denominator
    a = q.numerator
    net = _Dinic(n + 2)
    s, t = n, n + 1
    for v in range(n):
        net.add(s, v, m * b)
        net.add(v, t, m * b + 2 * a - g.degrees[v] * b)
    for u, v in sorted(g.edges):
        net.add(u, v, b)
        net.add(v, u, b)
    cut = net.max_flow(s, t)
    if cut >= m * n * b:
        return None
    side = net.source_side(s) - {s}
    return frozenset(side) if side else None


def densest_subgraph(g: Graph) -> tuple[Fraction, frozenset[int]]:
    """Exact maximum of |E(S)|/|S| over nonempty vertex sets, with witness.

    Parametric binary search over candidate densities; distinct achievable
    densities differ by at least 1/n^2, so the search certifies optimality
    with one final feasibility cut at the reported value.
    """
    if g.m == 0:
        return Fraction(0), frozenset({0})

    def density(S: frozenset[int]) -> Fraction:
        inside = sum(1 for u, v in g.edges if u in S and v in S)
        return Fraction(inside, len(S))

    best_set = frozenset(range(g.n))
    best = density(best_set)
    hi = Fraction(g.max_degree, 2)
    if best == hi:
        return best, best_set
    lo = best
    gap = Fraction(1, g.n * g.n)
    while hi - lo > gap:
        mid = (lo + hi) / 2
        S = _denser_subset(g, mid)
        if S is None:
            hi = mid
        else:
            d = density(S)
            if d > best:
                best, best_set = d, S
            lo = d
    if _denser_subset(g, best) is not None:
        raise AssertionError("density search failed to certify optimality")
    return best, best_set


# ---------------------------------------------------------------------------
# spectral gap and edge expansion

SPECTRAL_MAX_N = 4096


def spectral_gap(g: Graph) -> float:
    """Second-largest adjacency eigenvalue of a connected regular graph."""
    if g.n > SPECTRAL_MAX_N:
        raise DomainError(f"n={g.n} exceeds dense eigensolver limit {SPECTRAL_MAX_N}")
    if not g.is_regular():
        raise DomainError("spectral gap requires a regular graph")
    if not g.is_connected():
        raise DomainError("spectral gap requires a connected graph")
    if g.n == 1:
        raise DomainError("need at least two vertices")
    a = g.sparse_adjacency().toarray().astype(np.float64)
    eigs = np.linalg.eigvalsh(a)
    return float(eigs[-2])


@dataclass(frozen=True)
class BoundaryRatio:
    """Result of :func:`edge_boundary_ratio`.

    ``exact`` distinguishes the exhaustive value from a spectral lower
    bound; ``witness`` and ``min_boundary`` are only present in exact mode.
    """

    value: Fraction | float
    witness: frozenset[int] | None
    exact: bool
    min_boundary: int | None = None


EXPANSION_EXACT_LIMIT = 20


def edge_boundary_ratio(g: Graph, exact_limit: int = EXPANSION_EXACT_LIMIT) -> BoundaryRatio:
    """min |boundary(S)|/|S| over 0 < |S| <= n/2.

    Exhaustive (Gray-code) for n <= ``exact_limit``; larger regular graphs
    get the spectral bound (d - lambda_2)/2 flagged as inexact.
    """
    if g.n <= exact_limit:
        adj = g.adjacency
        in_s = [False] * g.n
        cut = 0
        size = 0
        best: Fraction | None = None
        best_set: frozenset[int] | None = None
        best_raw: int | None = None
        members: set[int] = set()
        half = Fraction(g.n, 2)
        for code in range(1, 1 << g.n):
            v = (code & -code).bit_length() - 1
            inside = sum(1 for y in adj[v] if in_s[y])
            if in_s[v]:
                cut -= g.degrees[v] - 2 * inside
                in_s[v] = False
                size -= 1
                members.discard(v)
            else:
                cut += g.degrees[v] - 2 * inside
                in_s[v] = True
                size += 1
                members.add(v)
            if 0 < size <= half:
                ratio = Fraction(cut, size)
                if best is None or ratio < best:
                    best = ratio
                    best_set = frozenset(members)
                if best_raw is None or cut < best_raw:
                    best_raw = cut
        assert best is not None and best_set is not None
        return BoundaryRatio(value=best, witness=best_set, exact=True, min_boundary=best_raw)
    if not g.is_regular():
        raise DomainError(
            f"n={g.n} exceeds exact limit {exact_limit} and the spectral bound needs regularity"
        )
    gap = (g.degrees[0] - spectral_gap(g)) / 2.0
    return BoundaryRatio(value=gap, witness=None, exact=False)
