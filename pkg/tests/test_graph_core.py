import math
from fractions import Fraction

import numpy as np
import pytest

from asymembed.graph_core import (
    DomainError,
    Graph,
    GraphFormatError,
    count_cycles,
    densest_subgraph,
    edge_boundary_ratio,
    enumerate_short_cycles,
    girth,
    parse_graph,
    serialize_graph,
    shortest_path_metric,
    spectral_gap,
)

from conftest import complete, cycle, path, petersen, random_graph, two_triangles_shared_edge
from oracles import brute_boundary_ratio, brute_cycle_sets, brute_densest, brute_girth


# ---------------------------------------------------------------------------
# construction and parsing


def test_loop_rejected():
    with pytest.raises(DomainError, match="loop"):
        Graph.from_edges(3, [(0, 0)])


def test_degree_declaration_checked():
    with pytest.raises(DomainError, match="declared degree"):
        Graph.from_edges(3, [(0, 1)], d=2)


def test_parse_roundtrip(g_petersen):
    text = serialize_graph(g_petersen)
    back = parse_graph(text)
    assert back.n == g_petersen.n
    assert back.edges == g_petersen.edges


def test_parse_duplicate_warns():
    text = "3 3\n0 1\n1 0\n1 2\n"
    with pytest.warns(UserWarning, match="duplicate"):
        g = parse_graph(text)
    assert g.m == 2


def test_parse_duplicate_strict_raises():
    text = "3 3\n0 1\n1 0\n1 2\n"
    with pytest.raises(GraphFormatError, match="duplicate"):
        parse_graph(text, strict=True)


@pytest.mark.parametrize(
    "text,frag",
    [
        ("", "empty"),
        ("3\n", "header"),
        ("2 1\n0 0\n", "loop"),
        ("2 1\n0 5\n", "out of range"),
        ("3 2\n0 1\n", "declares"),
        ("2 1\na b\n", "integers"),
    ],
)
def test_parse_rejects(text, frag):
    with pytest.raises(GraphFormatError, match=frag):
        parse_graph(text)


# ---------------------------------------------------------------------------
# metric


def test_metric_axioms_random(rng):
    for _ in range(20):
        g = random_graph(rng, 9, 0.3)
        t = shortest_path_metric(g)
        d = t.dist
        assert np.all(np.diag(d) == 0)
        assert np.array_equal(d, d.T)
        finite = np.isfinite(d)
        # triangle inequality including infinite entries
        for x in range(g.n):
            for y in range(g.n):
                for z in range(g.n):
                    assert d[x, z] <= d[x, y] + d[y, z] or not (finite[x, y] and finite[y, z])
        for u, v in g.edges:
            assert d[u, v] == 1


def test_metric_disconnected_inf():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    t = shortest_path_metric(g)
    assert t.distance(0, 2) == math.inf
    assert t.diameter() == math.inf


def test_petersen_diameter(g_petersen):
    assert shortest_path_metric(g_petersen).diameter() == 2


def test_ball_and_dist_to_set(g_path5):
    t = shortest_path_metric(g_path5)
    assert t.ball(0, 2) == (0, 1, 2)
    assert t.ball(2, 0) == (2,)
    assert t.dist_to_set(0, {3, 4}) == 3
    assert t.dist_to_set(0, set()) == math.inf
    assert t.set_ball({0, 4}, 1) == (0, 1, 3, 4)


# ---------------------------------------------------------------------------
# cycles


def test_threshold_validation(g_k4):
    with pytest.raises(DomainError):
        enumerate_short_cycles(g_k4, 2)


def test_k4_cycle_census(g_k4):
    # four triangles; the 4-element set appears once despite three 4-cycles
    cs = enumerate_short_cycles(g_k4, 5)
    lens = sorted(len(w) for w in cs.witnesses)
    assert lens == [3, 3, 3, 3, 4]


def test_petersen_five_cycles(g_petersen):
    cs = enumerate_short_cycles(g_petersen, 6)
    assert cs.count == 12
    assert all(len(w) == 5 for w in cs.witnesses)


def test_cycles_match_oracle(rng):
    for _ in range(30):
        g = random_graph(rng, 8, 0.35)
        got = {frozenset(w) for w in enumerate_short_cycles(g, 7).witnesses}
        want = brute_cycle_sets(g.n, g.edges, 7)
        assert got == want


def test_witness_is_canonical(rng):
    for _ in range(10):
        g = random_graph(rng, 8, 0.4)
        for w in enumerate_short_cycles(g, 8).witnesses:
            assert w[0] == min(w)
            assert w[1] < w[-1]
            for i in range(len(w)):
                assert g.has_edge(w[i], w[(i + 1) % len(w)])


def test_girth_values(g_petersen, g_k4, g_c6, g_path5):
    assert girth(g_petersen) == 5
    assert girth(g_k4) == 3
    assert girth(g_c6) == 6
    assert girth(g_path5) == math.inf


def test_girth_matches_oracle(rng):
    for _ in range(40):
        g = random_graph(rng, 9, 0.25)
        assert girth(g) == brute_girth(g.n, g.edges)


def test_count_cycles_closed_forms():
    assert count_cycles(complete(4), 3) == 4
    assert count_cycles(complete(4), 4) == 3
    assert count_cycles(complete(5), 5) == 12
    assert count_cycles(cycle(4), 4) == 1
    assert count_cycles(cycle(5), 5) == 1
    assert count_cycles(petersen(), 5) == 12
    assert count_cycles(petersen(), 3) == 0
    assert count_cycles(petersen(), 4) == 0


def _slow_cycle_subgraphs(g, r):
    # trace formulas count cycle subgraphs, not vertex sets, so the second
    # route enumerates closed walks up to rotation and reflection
    from itertools import combinations, permutations

    total = 0
    for combo in combinations(range(g.n), r):
        first, rest = combo[0], combo[1:]
        seen = set()
        for perm in permutations(rest):
            walk = (first,) + perm
            if all(g.has_edge(walk[i], walk[(i + 1) % r]) for i in range(r)):
                seen.add(min(walk, (first,) + perm[::-1]))
        total += len(seen)
    return total


def test_count_cycles_matches_enumeration(rng):
    for _ in range(20):
        g = random_graph(rng, 9, 0.35)
        for r in (3, 4, 5):
            assert count_cycles(g, r) == _slow_cycle_subgraphs(g, r)


# ---------------------------------------------------------------------------
# densest subgraph


def test_densest_known_values(g_k4, g_petersen, g_c6, g_path5):
    assert densest_subgraph(g_k4)[0] == Fraction(3, 2)
    assert densest_subgraph(g_petersen)[0] == Fraction(3, 2)
    assert densest_subgraph(g_c6)[0] == Fraction(1)
    assert densest_subgraph(g_path5)[0] == Fraction(4, 5)


def test_densest_witness_attains_value(rng):
    for _ in range(15):
        g = random_graph(rng, 10, 0.3)
        val, s = densest_subgraph(g)
        inside = sum(1 for u, v in g.edges if u in s and v in s)
        assert Fraction(inside, len(s)) == val


def test_densest_matches_oracle(rng):
    for _ in range(25):
        g = random_graph(rng, 9, 0.3)
        val, _ = densest_subgraph(g)
        want, _ = brute_densest(g.n, g.edges)
        assert val == want


def test_densest_empty_graph():
    g = Graph.from_edges(3, [])
    val, s = densest_subgraph(g)
    assert val == 0
    assert len(s) >= 1


# ---------------------------------------------------------------------------
# spectra and expansion


def test_spectral_gap_known(g_petersen, g_k4, g_c6):
    assert spectral_gap(g_petersen) == pytest.approx(1.0, abs=1e-8)
    assert spectral_gap(g_k4) == pytest.approx(-1.0, abs=1e-8)
    assert spectral_gap(g_c6) == pytest.approx(1.0, abs=1e-8)


def test_spectral_gap_domain():
    with pytest.raises(DomainError, match="regular"):
        spectral_gap(path(4))
    with pytest.raises(DomainError, match="connected"):
        spectral_gap(Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], d=2))


def test_boundary_ratio_known(g_k4, g_c6):
    r4 = edge_boundary_ratio(g_k4)
    assert r4.exact and r4.value == Fraction(2)
    r6 = edge_boundary_ratio(g_c6)
    assert r6.exact and r6.value == Fraction(2, 3)
    # witness attains the ratio
    s = r6.witness
    cut = sum(1 for u, v in g_c6.edges if (u in s) != (v in s))
    assert Fraction(cut, len(s)) == r6.value


def test_boundary_ratio_matches_oracle(rng):
    for _ in range(20):
        g = random_graph(rng, 8, 0.35)
        got = edge_boundary_ratio(g)
        assert got.exact
        assert got.value == brute_boundary_ratio(g.n, g.edges)


def test_boundary_ratio_spectral_fallback():
    g = cycle(30)
    r = edge_boundary_ratio(g, exact_limit=20)
    assert not r.exact
    lam = spectral_gap(g)
    assert r.value == pytest.approx((2 - lam) / 2)
    # the spectral value is a valid lower bound for the true ratio 2/ceil(n/2)
    assert r.value <= 2 / 15 + 1e-12


def test_boundary_spectral_bound_is_lower_bound(rng):
    # on small regular graphs the flagged bound never exceeds the exact value
    for g in (petersen(), complete(4), cycle(8)):
        exact = edge_boundary_ratio(g)
        lam = spectral_gap(g)
        bound = (g.degrees[0] - lam) / 2
        assert bound <= float(exact.value) + 1e-9


# ---------------------------------------------------------------------------
# misc structure


def test_induced_relabeling(g_petersen):
    sub, keep = g_petersen.induced([7, 2, 5])
    assert keep == (2, 5, 7)
    assert sub.n == 3
    # among {2,5,7}: spoke (2,7) and pentagram edge (5,7)
    assert sub.edges == frozenset({(0, 2), (1, 2)})


def test_remove_edges(g_c6):
    h = g_c6.remove_edges([(0, 1)])
    assert h.m == 5
    assert girth(h) == math.inf
