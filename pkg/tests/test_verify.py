import itertools
import math
import random
from fractions import Fraction
from math import comb

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from colorft.generators import random_colored_graph
from colorft.graph import ColoredGraph, FaultMode, FaultSet, Subgraph
from colorft.lowerbounds import build_flow_lb, build_reachability_lb, build_sourcewise_lb, build_tree_binary, \
    build_tree_T_dq
from colorft.verify import (
    count_fault_sets,
    enumerate_faults,
    max_disjoint_paths,
    probe_mandatory,
    verify_additive_stretch,
    verify_distance_preserver,
    verify_flow_preserver,
    verify_mandatory_edges,
    verify_reachability_preserver,
    verify_tree_properties,
)


def full(g):
    return Subgraph(g, frozenset(range(g.m)))


def without(g, *edge_ids):
    return Subgraph(g, frozenset(range(g.m)) - set(edge_ids))


@pytest.mark.parametrize("f", [0, 1, 2])
def test_identity_subgraph_passes(f):
    g = random_colored_graph(12, 2, 1, directed=True)
    assert verify_distance_preserver(g, full(g), sources=[0, 1], f=f).passed
    assert verify_reachability_preserver(g, full(g), 0, f).passed
    assert verify_flow_preserver(g, full(g), 0, f, 2).passed
    assert verify_additive_stretch(g, full(g), 2, f).passed


def test_missing_bridge_fails_fault_free():
    g = ColoredGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    rep = verify_distance_preserver(g, without(g, 1), [(0, 3)], f=0)
    assert not rep.passed
    (cx,) = rep.counterexamples
    assert cx.subject == (0, 3) and not cx.faults.members
    assert (cx.expected, cx.observed) == (3, math.inf)


def test_unreachable_in_both_counts_as_equal():
    g = ColoredGraph(3, [(0, 1, 1, "a")])
    assert verify_distance_preserver(g, full(g), sources=[0], f=1).passed


def test_weighted_distances_are_exact():
    g = ColoredGraph(3, [(0, 1, "1/3"), (1, 2, "1/3"), (0, 2, "3/4")])
    rep = verify_distance_preserver(g, without(g, 0), [(0, 2)], f=0)
    assert not rep.passed and rep.counterexamples[0].expected == Fraction(2, 3)
    assert rep.counterexamples[0].observed == Fraction(3, 4)


def test_edge_mode_enumeration_count():
    g = random_colored_graph(8, 1, 2)
    for f in range(3):
        rep = verify_distance_preserver(g, full(g), sources=[0], f=f, mode=FaultMode.EDGE)
        assert rep.fault_sets == sum(comb(g.m, k) for k in range(f + 1)) == count_fault_sets(g, f, FaultMode.EDGE)
        assert len(list(enumerate_faults(g, f, FaultMode.EDGE))) == rep.fault_sets
        assert rep.checks_run == rep.fault_sets * g.n


def test_cap_marks_inconclusive():
    g = random_colored_graph(10, 1, 0)
    rep = verify_distance_preserver(g, full(g), sources=[0], f=2, mode=FaultMode.EDGE, cap=10)
    assert rep.inconclusive and not rep.passed and rep.status == "INCONCLUSIVE"
    assert rep.checks_run == 0


def test_csv_report():
    g = ColoredGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    rep = verify_distance_preserver(g, without(g, 1), [(0, 3)], f=0)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "row,kind,subject,faults,expected,observed"
    assert lines[1].startswith("counterexample,distance,0 3,-,3,inf")
    assert lines[-1].startswith("summary,distance,status=FAIL")


def test_stretch_detects_excess():
    # 5-cycle: dropping one edge stretches its endpoints from 1 to 4
    g = ColoredGraph(5, [(i, (i + 1) % 5, 1) for i in range(5)])
    assert not verify_additive_stretch(g, without(g, 0), 2, 0).passed
    assert verify_additive_stretch(g, without(g, 0), 3, 0).passed


def test_reachability_lb_missing_edge_fails_under_witness():
    inst = build_reachability_lb(8, 2, 1)
    e, F = inst.mandatory_edges[5]
    h = without(inst.graph, e)
    rep = verify_reachability_preserver(inst.graph, h, inst.sources[0], 1)
    assert not rep.passed
    assert any(c.faults.members == F.members for c in rep.counterexamples)


def test_single_out_tree_preserves_fault_free_reachability():
    g = random_colored_graph(15, 2, 4, directed=True)
    seen, stack, tree = {0}, [0], set()
    while stack:
        v = stack.pop()
        for eid, w in g.out_adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(eid)
                stack.append(w)
    assert verify_reachability_preserver(g, Subgraph(g, frozenset(tree)), 0, 0).passed


def test_max_disjoint_paths_examples():
    k4 = ColoredGraph(4, [(u, v, 1) for u, v in itertools.permutations(range(4), 2)], directed=True)
    assert max_disjoint_paths(k4, 0, 3, 5) == 3
    assert max_disjoint_paths(k4, 0, 3, 2) == 2
    assert max_disjoint_paths(k4, 1, 1, 5) == 5
    two = ColoredGraph(4, [(0, 1, 1), (2, 3, 1)])
    assert max_disjoint_paths(two, 0, 3, 4) == 0
    with pytest.raises(ValueError):
        max_disjoint_paths(k4, 0, 1, 0)


def test_max_disjoint_paths_k4_brute_force():
    arcs = list(itertools.permutations(range(4), 2))
    # every simple 0 -> 3 path as a set of arcs
    paths = []
    for k in range(3):
        for mid in itertools.permutations([1, 2], k):
            seq = (0, *mid, 3)
            paths.append(frozenset(zip(seq, seq[1:])))
    best = max(len(fam) for r in range(len(paths) + 1) for fam in itertools.combinations(paths, r)
               if all(a.isdisjoint(b) for a, b in itertools.combinations(fam, 2)))
    k4 = ColoredGraph(4, [(u, v, 1) for u, v in arcs], directed=True)
    assert best == 3 == max_disjoint_paths(k4, 0, 3, 5)


def _nx_flow(g, dead, s, t):
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n))
    for e in g.edges:
        if e.id in dead or e.tail == e.head:
            continue
        arcs = [(e.tail, e.head)] if g.directed else [(e.tail, e.head), (e.head, e.tail)]
        for a, b in arcs:
            cap = d[a][b]["capacity"] + 1 if d.has_edge(a, b) else 1
            d.add_edge(a, b, capacity=cap)
    return nx.maximum_flow_value(d, s, t)


@given(st.integers(0, 10**6), st.booleans())
def test_max_disjoint_paths_matches_networkx(seed, directed):
    rng = random.Random(seed)
    g = random_colored_graph(rng.randint(2, 14), 1, seed, directed=directed, degree=rng.choice([2.0, 4.0]))
    dead = frozenset(rng.sample(range(g.m), min(2, g.m)))
    s, t = rng.sample(range(g.n), 2)
    want = _nx_flow(g, dead, s, t)
    for cap in (1, 2, 10):
        assert max_disjoint_paths(g.view(dead), s, t, cap) == min(cap, want)


def test_flow_lb_missing_edge_fails_under_witness():
    inst = build_flow_lb(4, 1, 1, 2)
    e, F = inst.mandatory_edges[3]
    rep = verify_flow_preserver(inst.graph, without(inst.graph, e), inst.sources[0], 1, 2)
    assert not rep.passed
    assert any(c.faults.members == F.members for c in rep.counterexamples)


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_flow_lambda_one_equals_reachability(seed):
    rng = random.Random(seed)
    g = random_colored_graph(rng.randint(3, 14), 2, seed, directed=True, degree=2.5)
    h = Subgraph(g, frozenset(e for e in range(g.m) if rng.random() < 0.8))
    s = rng.randrange(g.n)
    r = verify_reachability_preserver(g, h, s, 1)
    fl = verify_flow_preserver(g, h, s, 1, 1)
    assert {(c.subject, c.faults.members) for c in r.counterexamples} == \
        {(c.subject, c.faults.members) for c in fl.counterexamples}


def test_mandatory_edges_and_probes():
    inst = build_sourcewise_lb(1, 1, 16)
    rep = verify_mandatory_edges(inst)
    assert rep.passed and rep.checks_run == 64
    g = inst.graph
    e, F = inst.mandatory_edges[0]
    x = g.edges[e].tail
    # the same X-Y edge under another leaf's color is not forcing
    other = next(F2 for e2, F2 in inst.mandatory_edges if g.edges[e2].tail != x)
    assert not probe_mandatory(inst, e, other)
    assert verify_mandatory_edges(inst, probes=[(e, other)]).passed
    # a forcing probe is flagged
    assert not verify_mandatory_edges(inst, probes=[(e, F)]).passed


def test_wrong_witness_in_manifest_fails():
    inst = build_sourcewise_lb(1, 1, 16)
    g = inst.graph
    e, F = inst.mandatory_edges[0]
    other = next(F2 for e2, F2 in inst.mandatory_edges if F2 != F)
    inst.mandatory_edges = [(e, other)]
    rep = verify_mandatory_edges(inst)
    assert not rep.passed and rep.counterexamples[0].subject == (e,)


def test_empty_mandatory_list_is_vacuous():
    inst = build_reachability_lb(8, 2, 1)
    inst.mandatory_edges = []
    rep = verify_mandatory_edges(inst)
    assert rep.passed and rep.checks_run == 0


@pytest.mark.parametrize("tree", [build_tree_T_dq(2, 3), build_tree_binary(3)])
def test_tree_properties_pass(tree):
    rep = verify_tree_properties(tree)
    assert rep.passed
    assert rep.checks_run >= 3 + len(tree.leaves)


@pytest.mark.parametrize("make", [lambda: build_tree_T_dq(2, 3), lambda: build_tree_binary(3)])
def test_mutated_tree_reports_leaf(make):
    tree = make()
    g = tree.graph
    v = tree.leaves[0]
    c = tree.leaf_color[v]
    w = next(x for x in tree.leaves if tree.leaf_color[x] != c)
    # move one edge of c's class over to w's color
    moved = g.color_index[c][0]
    edges = [(e.tail, e.head, e.weight, tree.leaf_color[w] if e.id == moved else e.color) for e in g.edges]
    bad = type(tree)(ColoredGraph(g.n, edges, g.directed), tree.root, tree.leaves, tree.leaf_color,
                     tree.family, tree.delta, tree.q)
    rep = verify_tree_properties(bad)
    offenders = {cx.subject[1] for cx in rep.counterexamples if cx.subject[0] == "property-a"}
    assert offenders & {v, w}


def test_fault_set_enumeration_in_color_mode():
    g = ColoredGraph(3, [(0, 1, 1, "a"), (1, 2, 1, "b"), (0, 2, 1, "b")])
    sets = [F.members for F in enumerate_faults(g, 1, FaultMode.COLOR)]
    assert sets == [frozenset(), frozenset({"a"}), frozenset({"b"})]
    assert all(isinstance(F, FaultSet) for F in enumerate_faults(g, 2, FaultMode.COLOR))
