"""Brute-force oracles: every fault set is enumerated and plain distances compared.

Nothing here uses the perturbed metric except the near-set and key-claim
checks, which are statements about canonical paths by definition.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from math import comb
from typing import Iterable, Iterator, Optional, Sequence

from .graph import ColoredGraph, FaultMode, FaultSet, GraphView, Subgraph

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class Counterexample:
    subject: tuple          # (s, t) pair, or (t,) for single-source checks
    faults: FaultSet
    expected: object
    observed: object

    def sort_key(self):
        return (sorted(map(str, self.faults.members)), self.subject)


@dataclass
class VerificationReport:
    kind: str
    checks_run: int = 0
    fault_sets: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    elapsed: float = 0.0
    inconclusive: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and not self.inconclusive

    @property
    def status(self) -> str:
        if self.counterexamples:
            return "FAIL"
        return "INCONCLUSIVE" if self.inconclusive else "PASS"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "kind", "subject", "faults", "expected", "observed"])
        for cx in sorted(self.counterexamples, key=Counterexample.sort_key):
            w.writerow(["counterexample", self.kind, " ".join(map(str, cx.subject)),
                        cx.faults.label(), _fmt(cx.expected), _fmt(cx.observed)])
        w.writerow(["summary", self.kind, f"status={self.status}", f"fault_sets={self.fault_sets}",
                    f"checks={self.checks_run}", f"counterexamples={len(self.counterexamples)}"])
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None or x == math.inf:
        return "inf"
    return str(x)


# ------------------------------------------------------------------ distances

def distances(view: GraphView, source: int) -> list[Optional[int]]:
    """Plain single-source distances in integer weight units (None = unreachable)."""
    g = view.graph
    dead = view.dead
    dist: list[Optional[int]] = [None] * g.n
    dist[source] = 0
    if g.unweighted:
        q = deque([source])
        while q:
            v = q.popleft()
            dv = dist[v] + 1
            for eid, w in g.out_adj[v]:
                if dist[w] is None and eid not in dead:
                    dist[w] = dv
                    q.append(w)
        return dist
    wts = g.int_weights
    heap = [(0, source)]
    while heap:
        d, v = heappop(heap)
        if d != dist[v]:
            continue
        for eid, w in g.out_adj[v]:
            if eid in dead:
                continue
            nd = d + wts[eid]
            if dist[w] is None or nd < dist[w]:
                dist[w] = nd
                heappush(heap, (nd, w))
    return dist


def reachable_set(view: GraphView, source: int) -> set[int]:
    g = view.graph
    seen = {source}
    stack = [source]
    while stack:
        v = stack.pop()
        for eid, w in g.out_adj[v]:
            if w not in seen and eid not in view.dead:
                seen.add(w)
                stack.append(w)
    return seen


def _as_weight(g: ColoredGraph, d: Optional[int]):
    if d is None:
        return math.inf
    return d if g.scale == 1 else Fraction(d, g.scale)


def fault_universe(g: ColoredGraph, mode: FaultMode) -> list:
    return list(g.colors) if mode is FaultMode.COLOR else list(range(g.m))


def count_fault_sets(g: ColoredGraph, f: int, mode: FaultMode) -> int:
    k = len(fault_universe(g, mode))
    return sum(comb(k, i) for i in range(f + 1))


def enumerate_faults(g: ColoredGraph, f: int, mode: FaultMode) -> Iterator[FaultSet]:
    items = fault_universe(g, mode)
    for k in range(f + 1):
        for combo in itertools.combinations(items, k):
            yield FaultSet(mode, frozenset(combo), f)


def _coerce_mode(mode) -> FaultMode:
    return mode if isinstance(mode, FaultMode) else FaultMode(str(mode).lower())


def _group_pairs(g: ColoredGraph, pairs, sources) -> dict[int, list[int]]:
    by_source: dict[int, list[int]] = {}
    if sources is not None:
        for s in sorted(set(sources)):
            by_source[s] = list(range(g.n))
    for s, t in pairs or ():
        by_source.setdefault(s, [])
        if t not in by_source[s]:
            by_source[s].append(t)
    return by_source


# ------------------------------------------------------------------ preservers

def verify_distance_preserver(
    g: ColoredGraph,
    h: Subgraph,
    pairs: Optional[Iterable[tuple[int, int]]] = None,
    f: int = 1,
    mode=FaultMode.COLOR,
    *,
    sources: Optional[Iterable[int]] = None,
    cap: int = DEFAULT_CAP,
) -> VerificationReport:
    """dist_{H-F}(s, t) == dist_{G-F}(s, t) for every pair and every |F| <= f (inf == inf)."""
    start = time.perf_counter()
    mode = _coerce_mode(mode)
    if h.parent is not g:
        raise ValueError("subgraph does not belong to this graph")
    by_source = _group_pairs(g, pairs, sources)
    n_pairs = sum(len(ts) for ts in by_source.values())
    report = VerificationReport("distance", fault_sets=count_fault_sets(g, f, mode))
    if report.fault_sets * n_pairs > cap:
        report.inconclusive = True
        report.notes.append(f"{report.fault_sets * n_pairs} checks exceed cap {cap}")
        report.elapsed = time.perf_counter() - start
        return report
    absent = h.view().dead
    for F in enumerate_faults(g, f, mode):
        dead = F.dead_edges(g)
        gv, hv = GraphView(g, dead), GraphView(g, absent | dead)
        for s, targets in by_source.items():
            dg, dh = distances(gv, s), distances(hv, s)
            for t in targets:
                report.checks_run += 1
                if dg[t] != dh[t]:
                    report.counterexamples.append(
                        Counterexample((s, t), F, _as_weight(g, dg[t]), _as_weight(g, dh[t])))
    report.elapsed = time.perf_counter() - start
    return report


def verify_additive_stretch(
    g: ColoredGraph, h: Subgraph, stretch: int = 2, f: int = 1, mode=FaultMode.COLOR, *, cap: int = DEFAULT_CAP
) -> VerificationReport:
    """0 <= dist_{H-F}(u, v) - dist_{G-F}(u, v) <= stretch for all pairs (unreachable must match)."""
    start = time.perf_counter()
    mode = _coerce_mode(mode)
    report = VerificationReport(f"stretch+{stretch}", fault_sets=count_fault_sets(g, f, mode))
    if report.fault_sets * g.n * g.n > cap:
        report.inconclusive = True
        report.elapsed = time.perf_counter() - start
        return report
    absent = h.view().dead
    bound = stretch * g.scale
    for F in enumerate_faults(g, f, mode):
        dead = F.dead_edges(g)
        gv, hv = GraphView(g, dead), GraphView(g, absent | dead)
        for u in range(g.n):
            dg, dh = distances(gv, u), distances(hv, u)
            for v in range(g.n):
                report.checks_run += 1
                a, b = dg[v], dh[v]
                ok = a == b if a is None or b is None else 0 <= b - a <= bound
                if not ok:
                    report.counterexamples.append(
                        Counterexample((u, v), F, _as_weight(g, a), _as_weight(g, b)))
    report.elapsed = time.perf_counter() - start
    return report


def verify_reachability_preserver(
    g: ColoredGraph, h: Subgraph, s: int, f: int = 1, mode=FaultMode.COLOR, *, cap: int = DEFAULT_CAP
) -> VerificationReport:
    start = time.perf_counter()
    mode = _coerce_mode(mode)
    report = VerificationReport("reachability", fault_sets=count_fault_sets(g, f, mode))
    if report.fault_sets * g.n > cap:
        report.inconclusive = True
        report.elapsed = time.perf_counter() - start
        return report
    absent = h.view().dead
    for F in enumerate_faults(g, f, mode):
        dead = F.dead_edges(g)
        rg = reachable_set(GraphView(g, dead), s)
        rh = reachable_set(GraphView(g, absent | dead), s)
        for t in range(g.n):
            report.checks_run += 1
            if (t in rg) != (t in rh):
                report.counterexamples.append(Counterexample((t,), F, t in rg, t in rh))
    report.elapsed = time.perf_counter() - start
    return report


def max_disjoint_paths(view: "GraphView | ColoredGraph", s: int, t: int, cap: int) -> int:
    """min(cap, max number of edge-disjoint s->t paths) by unit-capacity augmentation.

    Convention: s == t saturates the cap. Undirected edges carry one unit in
    either direction.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if isinstance(view, ColoredGraph):
        view = view.view()
    if s == t:
        return cap
    g = view.graph
    dead = view.dead
    flow = [0] * g.m  # +1 along tail->head, -1 along head->tail
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e in g.edges:
        if e.id in dead or e.tail == e.head:
            continue
        adj[e.tail].append((e.id, e.head))
        adj[e.head].append((e.id, e.tail))
    edges = g.edges
    directed = g.directed

    def residual(eid: int, frm: int) -> int:
        fl = flow[eid]
        if frm == edges[eid].tail:
            return 1 - fl
        return fl if directed else 1 + fl

    total = 0
    while total < cap:
        back: dict[int, tuple[int, int]] = {s: (-1, -1)}
        q = deque([s])
        while q and t not in back:
            v = q.popleft()
            for eid, w in adj[v]:
                if w not in back and residual(eid, v) > 0:
                    back[w] = (eid, v)
                    q.append(w)
        if t not in back:
            break
        x = t
        while x != s:
            eid, v = back[x]
            flow[eid] += 1 if v == edges[eid].tail else -1
            x = v
        total += 1
    return total


def verify_flow_preserver(
    g: ColoredGraph, h: Subgraph, s: int, f: int, lam: int, mode=FaultMode.COLOR, *, cap: int = DEFAULT_CAP
) -> VerificationReport:
    """For every F and t: H - F keeps min(alpha, lam) edge-disjoint s->t paths."""
    start = time.perf_counter()
    mode = _coerce_mode(mode)
    report = VerificationReport(f"flow{lam}", fault_sets=count_fault_sets(g, f, mode))
    if report.fault_sets * g.n > cap:
        report.inconclusive = True
        report.elapsed = time.perf_counter() - start
        return report
    absent = h.view().dead
    for F in enumerate_faults(g, f, mode):
        dead = F.dead_edges(g)
        gv, hv = GraphView(g, dead), GraphView(g, absent | dead)
        for t in range(g.n):
            if t == s:
                continue
            report.checks_run += 1
            alpha = max_disjoint_paths(gv, s, t, lam + 1)
            need = min(alpha, lam)
            got = max_disjoint_paths(hv, s, t, lam) if need else 0
            if got < need:
                report.counterexamples.append(Counterexample((t,), F, need, got))
    report.elapsed = time.perf_counter() - start
    return report


# ------------------------------------------------------------------ lower-bound instances

def _demand_holds(inst, hview_dead: frozenset, faults: FaultSet) -> bool:
    """Does G minus ``hview_dead`` satisfy the instance's preserver condition under ``faults``?"""
    g = inst.graph
    dead = faults.dead_edges(g)
    gv, hv = GraphView(g, dead), GraphView(g, hview_dead | dead)
    kind = inst.mode
    if kind == "distance":
        for s in inst.sources:
            dg, dh = distances(gv, s), distances(hv, s)
            targets = inst.targets if inst.targets is not None else range(g.n)
            if any(dg[t] != dh[t] for t in targets):
                return False
        return True
    if kind == "reachability":
        return all(reachable_set(gv, s) == reachable_set(hv, s) for s in inst.sources)
    if kind == "flow":
        lam = inst.lam
        for s in inst.sources:
            for t in range(g.n):
                if t == s:
                    continue
                need = min(max_disjoint_paths(gv, s, t, lam + 1), lam)
                if need and max_disjoint_paths(hv, s, t, lam) < need:
                    return False
        return True
    raise ValueError(f"unknown instance mode {kind!r}")


def probe_mandatory(inst, edge_id: int, faults: FaultSet) -> bool:
    """True if deleting ``edge_id`` breaks the instance's demand under ``faults``."""
    return not _demand_holds(inst, frozenset((edge_id,)), faults)


def verify_mandatory_edges(inst, probes: Sequence[tuple[int, FaultSet]] = ()) -> VerificationReport:
    """Each (e, F) in the manifest: G passes under F, G - e fails under F.

    ``probes`` are negative controls: pairs expected NOT to be forcing; any
    that does force is reported as a counterexample.
    """
    start = time.perf_counter()
    report = VerificationReport(f"mandatory-{inst.mode}")
    witnesses = {F for _, F in inst.mandatory_edges}
    report.fault_sets = len(witnesses)
    for F in witnesses:
        if F.budget is not None and len(F) > F.budget:
            report.counterexamples.append(Counterexample(("budget",), F, F.budget, len(F)))
        if not _demand_holds(inst, frozenset(), F):
            report.counterexamples.append(Counterexample(("full-graph",), F, True, False))
    for e, F in inst.mandatory_edges:
        report.checks_run += 1
        if not probe_mandatory(inst, e, F):
            report.counterexamples.append(Counterexample((e,), F, "forced", "not forced"))
    for e, F in probes:
        report.checks_run += 1
        if probe_mandatory(inst, e, F):
            report.counterexamples.append(Counterexample((e,), F, "not forced", "forced"))
    report.elapsed = time.perf_counter() - start
    return report


def verify_tree_properties(tree) -> VerificationReport:
    """Closed forms and the per-leaf survivor property of a generated tree."""
    start = time.perf_counter()
    report = VerificationReport(f"tree-{tree.family}")
    g = tree.graph
    F0 = FaultSet(FaultMode.COLOR, frozenset())

    def check(name, expected, observed):
        report.checks_run += 1
        if expected != observed:
            report.counterexamples.append(Counterexample((name,), F0, expected, observed))

    check("leaves", tree.expected_leaves, len(tree.leaves))
    check("edges", tree.expected_edges, g.m)
    check("max-class-size", True, g.delta <= tree.delta)
    depth = distances(g.view(), tree.root)
    if tree.family == "T(delta,q)":
        lo, hi = tree.depth_bounds
        for v in tree.leaves:
            check(f"depth[{v}]", True, depth[v] is not None and lo <= depth[v] <= hi)
    leaf_set = set(tree.leaves)
    for v in tree.leaves:
        F = FaultSet.colors(tree.leaf_color[v])
        d = distances(GraphView(g, F.dead_edges(g)), tree.root)
        alive = [x for x in leaf_set if d[x] is not None]
        if tree.family == "T(delta,q)":
            best = min((d[x] for x in alive), default=None)
            winners = [x for x in alive if d[x] == best]
            ok = winners == [v]
        else:
            ok = alive == [v]
        report.checks_run += 1
        if not ok:
            report.counterexamples.append(Counterexample(("property-a", v), F, [v], sorted(alive)))
    report.elapsed = time.perf_counter() - start
    return report


# ------------------------------------------------------------------ canonical-path analysis

def edge_distance_to(g: ColoredGraph, metric, path_edges: Sequence[int], path_vertices: Sequence[int],
                     e: int, t: int, dead: frozenset):
    """dist(e, t | F) for an edge e traversed along a path: w(e) + dist(next vertex, t | F)."""
    i = path_edges.index(e)
    nxt = path_vertices[i + 1]
    rev = GraphView(g.reversed(), dead)
    d = distances(rev, t)[nxt]
    return None if d is None else g.int_weights[e] + d


def canonical_order(metric, s: int, t: int, F: frozenset) -> Optional[list[int]]:
    """e_i = last edge of F on pi(s, t | F_i); None if some prefix path avoids F."""
    order: list[int] = []
    remaining = set(F)
    while remaining:
        p = metric.tree(s, frozenset(order)).path(t)
        on = [e for e in p.edges if e in remaining]
        if not on:
            return None
        e = on[-1]
        order.append(e)
        remaining.discard(e)
    return order


def is_minimal(metric, s: int, t: int, F: frozenset) -> bool:
    full = metric.tree(s, F).path(t).edges
    for k in range(len(F)):
        for sub in itertools.combinations(sorted(F), k):
            if metric.tree(s, frozenset(sub)).path(t).edges == full:
                return False
    return True


def canonical_distances(metric, s: int, t: int, order: Sequence[int]) -> list[Optional[int]]:
    """delta_i = dist(e_i, t | F_i) along the canonical order."""
    g = metric.graph
    out = []
    for i, e in enumerate(order):
        prefix = frozenset(order[:i])
        p = metric.tree(s, prefix).path(t)
        out.append(edge_distance_to(g, metric, p.edges, p.vertices, e, t, prefix))
    return out


def is_near(deltas: Sequence[int], thresholds: Sequence[float]) -> bool:
    k = len(deltas)
    for perm in itertools.permutations(range(k)):
        if all(deltas[i] is not None and deltas[i] <= thresholds[perm[i]] for i in range(k)):
            return True
    return False


def classify_fault_sets(metric, s: int, t: int, f: int, thresholds: Sequence[float]):
    """Yield (F, order, deltas, near) for every minimal F with |F| <= f, by exhaustive enumeration."""
    g = metric.graph
    for k in range(f + 1):
        for combo in itertools.combinations(range(g.m), k):
            F = frozenset(combo)
            if not is_minimal(metric, s, t, F):
                continue
            order = canonical_order(metric, s, t, F)
            if order is None:
                continue
            deltas = canonical_distances(metric, s, t, order)
            yield F, order, deltas, is_near(deltas, thresholds[:k])


def near_cover_check(metric, sources: Iterable[int], f: int, thresholds: Sequence[float],
                     generated: dict) -> VerificationReport:
    """Every minimal near F (exhaustive enumeration) appears among the generated fault sets.

    ``generated`` maps (s, t) to a collection of frozensets.
    """
    start = time.perf_counter()
    report = VerificationReport("near-cover")
    g = metric.graph
    for s in sorted(set(sources)):
        for t in range(g.n):
            if t == s:
                continue
            have = generated.get((s, t), ())
            for F, order, deltas, near in classify_fault_sets(metric, s, t, f, thresholds):
                if not near:
                    continue
                report.checks_run += 1
                if F not in have:
                    report.counterexamples.append(
                        Counterexample((s, t), FaultSet(FaultMode.EDGE, F), "generated", "missing"))
    report.elapsed = time.perf_counter() - start
    return report


def check_key_claim(metric, sources: Iterable[int], f: int, thresholds: Sequence[float]) -> VerificationReport:
    """For far minimal F: pick j with sorted delta_(j) > D_j; every a within D_j of t on
    pi(s, t | F) has pi(a, t | F) == pi(a, t | F - F'), F' the j largest-delta edges.

    Uses integer thresholds D_j = ceil(d_j), the suffix lengths the builder works with.
    """
    start = time.perf_counter()
    report = VerificationReport("key-claim")
    g = metric.graph
    D = [math.ceil(d) for d in thresholds]
    for s in sorted(set(sources)):
        for t in range(g.n):
            if t == s:
                continue
            for F, order, deltas, _ in classify_fault_sets(metric, s, t, f, thresholds):
                k = len(order)
                if k == 0 or is_near(deltas, D[:k]) or any(x is None for x in deltas):
                    continue
                tau = sorted(range(k), key=lambda i: -deltas[i])
                for j in range(1, k + 1):
                    if not deltas[tau[j - 1]] > D[j - 1]:
                        continue
                    Fp = frozenset(order[tau[i]] for i in range(j))
                    tree_F = metric.tree(s, F)
                    for a in tree_F.suffix_vertices(t, D[j - 1]):
                        report.checks_run += 1
                        lhs = metric.tree(a, F).path(t).edges
                        rhs = metric.tree(a, F - Fp).path(t).edges
                        if lhs != rhs:
                            report.counterexamples.append(
                                Counterexample((s, t, a), FaultSet(FaultMode.EDGE, F), lhs, rhs))
    report.elapsed = time.perf_counter() - start
    return report
