import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from colorft.generators import random_colored_graph
from colorft.graph import ColoredGraph, FaultSet
from colorft.paths import (
    ShortestPathTree,
    TieBrokenMetric,
    UniquenessViolation,
    last_edge,
    make_metric,
    shortest_path,
    verify_uniqueness,
)
from colorft.verify import distances


def path_graph(n, colors=None):
    colors = colors or [f"c{i}" for i in range(n - 1)]
    return ColoredGraph(n, [(i, i + 1, 1, colors[i]) for i in range(n - 1)])


def test_path_graph_queries():
    g = path_graph(4)
    m = make_metric(g, 1)
    p = shortest_path(g, m, 0, 3)
    assert p.edges == (0, 1, 2) and p.vertices == (0, 1, 2, 3) and p.weight == 3
    cut = shortest_path(g, m, 0, 3, FaultSet.colors("c1"))
    assert not cut.reachable and cut.edges == ()
    assert last_edge(g, m, 0, 2) == 1
    assert last_edge(g, m, 2, 2) is None
    assert shortest_path(g, m, 2, 2).length == 0


def test_four_cycle_tie_broken_and_stable():
    g = ColoredGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    m = make_metric(g, 5)
    p = shortest_path(g, m, 0, 2)
    routes = {(0, 1): (0, 1), (3, 2): (3, 2)}   # via 1 or via 3
    chosen = next(r for r in routes.values() if set(r) == set(p.edges))
    other = next(r for r in routes.values() if r != chosen)
    w = [m.perturbed_weight(e) for e in range(4)]
    assert sum(w[e] for e in chosen) < sum(w[e] for e in other)
    # failing an edge of the losing route leaves the winner unchanged
    for e in other:
        assert shortest_path(g, m, 0, 2, [e]).edges == p.edges


def test_perturbation_is_small():
    g = random_colored_graph(20, 2, 4, weighted=True)
    m = make_metric(g, 4)
    total = sum(m.perturbed_weight(e) - g.edges[e].weight for e in range(g.m))
    assert 0 <= total < Fraction(1, 2 * g.scale)
    assert all(0 <= m.perturbed_weight(e) - g.edges[e].weight < m.delta for e in range(g.m))


def test_unweighted_k4_all_pairs_unique():
    g = ColoredGraph(4, [(u, v, 1) for u, v in itertools.combinations(range(4), 2)])
    m = make_metric(g, 0)
    assert m.uniqueness_verified
    for u, v in itertools.permutations(range(4), 2):
        assert shortest_path(g, m, u, v).edges  # direct edge, unique under w'


def test_forced_tie_is_detected():
    g = ColoredGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    m = TieBrokenMetric(g, 0, _keys=(10, 10, 10, 10))
    with pytest.raises(UniquenessViolation):
        verify_uniqueness(m)


def test_metric_bound_to_graph():
    g, h = path_graph(3), path_graph(3)
    with pytest.raises(ValueError):
        shortest_path(h, make_metric(g), 0, 2)


def test_directed_reverse_metric_shares_keys():
    g = random_colored_graph(12, 2, 9, directed=True)
    m = make_metric(g, 9)
    r = m.reversed()
    assert r.keys == m.keys and r.graph.directed
    for s in range(g.n):
        fwd = m.tree(s)
        for t in fwd.reachable():
            back = r.tree(t).path(s)
            assert back.edges == tuple(reversed(fwd.path(t).edges))


def _instance(seed, directed, weighted):
    rng = random.Random(seed)
    n = rng.randint(3, 14)
    g = random_colored_graph(n, rng.randint(0, 3), seed, directed=directed, weighted=weighted,
                             family=rng.choice(["gnp", "ring"]), degree=3.0, max_weight=3)
    return g, make_metric(g, seed), rng


@given(st.integers(0, 10**6), st.booleans(), st.booleans())
def test_weight_fidelity(seed, directed, weighted):
    g, m, rng = _instance(seed, directed, weighted)
    F = frozenset(rng.sample(range(g.m), min(2, g.m)))
    for u in range(g.n):
        true = distances(g.view(F), u)
        tree = m.tree(u, F)
        for v in range(g.n):
            p = tree.path(v)
            if true[v] is None:
                assert not p.reachable
            else:
                assert p.weight * g.scale == true[v]
                assert sum(g.edges[e].weight for e in p.edges) == p.weight


@given(st.integers(0, 10**6), st.booleans())
def test_consistency(seed, directed):
    g, m, rng = _instance(seed, directed, False)
    F = frozenset(rng.sample(range(g.m), min(1, g.m)))
    u = rng.randrange(g.n)
    for v in m.tree(u, F).reachable():
        p = m.tree(u, F).path(v)
        for i, x in enumerate(p.vertices):
            for j in range(i + 1, len(p.vertices)):
                assert m.tree(x, F).path(p.vertices[j]).edges == p.edges[i:j]
            if x != v:
                assert m.tree(x, F).last_edge(v) == m.tree(u, F).last_edge(v)


@given(st.integers(0, 10**6), st.booleans(), st.booleans())
def test_stability(seed, directed, weighted):
    g, m, rng = _instance(seed, directed, weighted)
    u = rng.randrange(g.n)
    tree = m.tree(u)
    for v in range(g.n):
        p = tree.path(v)
        for e in set(range(g.m)) - set(p.edges):
            assert m.tree(u, [e]).path(v).edges == p.edges


@given(st.integers(0, 10**6), st.booleans(), st.booleans())
def test_incremental_tree_matches_rebuild(seed, directed, weighted):
    g, m, rng = _instance(seed, directed, weighted)
    u = rng.randrange(g.n)
    F1 = frozenset(rng.sample(range(g.m), min(1, g.m)))
    F2 = frozenset(rng.sample(range(g.m), min(2, g.m)))
    inc = m.tree(u, F1).without(F2)
    full = ShortestPathTree.build(m, u, F1 | F2)
    assert inc.key == full.key and inc.parent == full.parent and inc.hops == full.hops


def test_suffix_queries():
    g = path_graph(6)
    tree = make_metric(g).tree(0)
    assert tree.suffix_edges(5, 2) == [4, 3]
    assert tree.suffix_vertices(5, 2) == [4, 3]
    assert tree.suffix_vertices(2, 10) == [1, 0]
    assert tree.subtree(3) == [3, 4, 5]
