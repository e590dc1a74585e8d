"""Pairwise 1-CFT distance preservers and 1-CFT +2 spanners built on sourcewise preservers."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import ColoredGraph, FaultMode, Subgraph
from .hitting import greedy_hitting_set
from .paths import ShortestPathTree, TieBrokenMetric, reseed
from .sourcewise_cft import construct_1cft_sourcewise, snap
from .verify import verify_additive_stretch, verify_distance_preserver


class CoverageError(RuntimeError):
    """No seed among the allowed retries produced a good round for every short triplet."""


def pair_set(g: ColoredGraph, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for s, t in pairs:
        if not (0 <= s < g.n and 0 <= t < g.n):
            raise ValueError(f"pair ({s}, {t}) out of range")
        out.append((int(s), int(t)))
    return list(dict.fromkeys(out))


def pairwise_ell(n: int, num_pairs: int, delta: int) -> int:
    return max(1, math.ceil(snap((n * n / num_pairs) ** ((delta + 1) / (2 * delta + 3)))))


def round_count(n: int, ell: int) -> int:
    return max(1, math.ceil(40 * ell * math.log(max(n, 2))))


@dataclass
class PairwiseBuild:
    subgraph: Subgraph
    ell: int
    rounds: int
    seed: int                         # seed of the successful attempt
    attempts: int
    hitting: frozenset                # S for long triplets
    long_triplets: list               # (s, t, color or None)
    short_triplets: list
    good_round: dict = field(default_factory=dict)   # short triplet -> first good round
    sampled: list = field(default_factory=list, repr=False)  # F_i per round


def _triplets(g: ColoredGraph, metric: TieBrokenMetric, P):
    """(s, t, c, path) for the fault-free path (c = None) and each color on it."""
    for s, t in P:
        base = metric.tree(s).path(t)
        if not base.reachable or s == t:
            continue
        yield s, t, None, base
        for c in sorted({g.edges[e].color for e in base.edges} - {None}):
            p = metric.tree(s, g.color_index[c]).path(t)
            if p.reachable:
                yield s, t, c, p


def build_1cft_pairwise_detailed(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    pairs: Iterable[tuple[int, int]],
    seed: int = 0,
    ell: Optional[int] = None,
    *,
    max_reseeds: int = 5,
    verify: bool = True,
) -> PairwiseBuild:
    if not g.unweighted:
        raise ValueError("pairwise 1-CFT preservers are defined for unweighted graphs")
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    P = pair_set(g, pairs)
    if not P:
        raise ValueError("pair set must be nonempty")
    n = max(g.n, 2)
    if ell is None:
        ell = pairwise_ell(n, len(P), g.delta)
    r = round_count(n, ell)

    long_t, short_t, base_paths = [], [], set()
    for s, t, c, p in _triplets(g, metric, P):
        if c is None:
            base_paths.update(p.edges)
        (long_t if p.length >= ell else short_t).append((s, t, c, p))

    H: set[int] = set(base_paths)
    S: frozenset = frozenset()
    if long_t:
        S = frozenset(greedy_hitting_set([frozenset(p.vertices) for *_, p in long_t]))
        H |= construct_1cft_sourcewise(g, metric, S).subgraph.edge_ids
        if g.directed:
            rev = metric.reversed()
            H |= construct_1cft_sourcewise(rev.graph, rev, S).subgraph.edge_ids
    long_keys = [(s, t, c) for s, t, c, _ in long_t]
    for s, t, c, p in long_t:
        if S.isdisjoint(p.vertices):
            raise AssertionError(f"long triplet {(s, t, c)} not hit")

    # short triplets: colors sampled per round, verify coverage, reseed if a triplet has no good round
    colors = g.colors
    # fault-free triplets are covered by the base paths; only colored ones need a good round
    short_colors = {(s, t, c): {g.edges[e].color for e in p.edges} - {None}
                    for s, t, c, p in short_t if c is not None}
    by_source: dict[int, list[int]] = {}
    for s, t in P:
        by_source.setdefault(s, []).append(t)
    for attempt in range(max_reseeds + 1):
        cur_seed = reseed(seed, attempt)
        rng = random.Random(cur_seed)
        added: set[int] = set()
        good: dict = {}
        sampled = []
        for i in range(r):
            F = frozenset(c for c in colors if rng.random() < 1 / ell)
            sampled.append(F)
            pending = [k for k in short_colors if k not in good and k[2] in F
                       and short_colors[k].isdisjoint(F)]
            for k in pending:
                good[k] = i
            if not F:
                continue
            dead = g.edges_of_colors(F)
            for s, targets in by_source.items():
                tree = ShortestPathTree.build(metric, s, dead, targets=targets)
                for t in targets:
                    if tree.key[t] is not None and tree.hops[t] < ell:
                        added.update(tree.path(t).edges)
        if len(good) == len(short_colors):
            break
    else:
        missing = sorted(set(short_colors) - set(good), key=str)[:3]
        raise CoverageError(f"short triplets without a good round after {max_reseeds} reseeds: {missing}")
    H |= added
    out = PairwiseBuild(Subgraph(g, frozenset(H)), ell, r, cur_seed, attempt + 1, S, long_keys,
                        list(short_colors), good, sampled)
    if verify:
        rep = verify_distance_preserver(g, out.subgraph, P, f=1, mode=FaultMode.COLOR)
        if not rep.passed:
            raise AssertionError(f"pairwise preserver failed verification: {rep.counterexamples[:1]}")
    return out


def build_1cft_pairwise(g: ColoredGraph, metric: TieBrokenMetric, pairs, seed: int = 0,
                        ell: Optional[int] = None, **kw) -> Subgraph:
    return build_1cft_pairwise_detailed(g, metric, pairs, seed, ell, **kw).subgraph


# ------------------------------------------------------------------ +2 spanner


def spanner_ell(n: int, delta: int) -> int:
    n = max(n, 2)
    return max(1, math.ceil(snap((n * math.log(n)) ** (1 - 1 / (delta + 2)))))


def incident_colors(g: ColoredGraph, v: int) -> int:
    """Distinct colors on edges at v; every uncolored edge counts as its own color."""
    seen, plain = set(), 0
    for eid, _ in g.out_adj[v]:
        c = g.edges[eid].color
        if c is None:
            plain += 1
        else:
            seen.add(c)
    return len(seen) + plain


@dataclass
class SpannerBuild:
    subgraph: Subgraph
    ell: int
    colorful: frozenset
    sources: frozenset
    dull_edges: frozenset
    src_edges: frozenset
    max_dull_degree: int


def _two_color_hits(g: ColoredGraph, x: int, S: set) -> int:
    """Distinct colors on edges from x into S, counted up to 2."""
    seen = set()
    for eid, y in g.out_adj[x]:
        if y in S and y != x:
            c = g.edges[eid].color
            seen.add(("none", eid) if c is None else c)
            if len(seen) >= 2:
                return 2
    return len(seen)


def two_color_sources(g: ColoredGraph, colorful: Iterable[int]) -> set[int]:
    """Greedy S: each colorful vertex gets two distinctly-colored edges into S.

    Neighbours adjacent to many colorful vertices are preferred.
    """
    colorful = sorted(colorful)
    cset = set(colorful)
    weight = [sum(1 for _, y in g.out_adj[v] if y in cset) for v in range(g.n)]
    S: set[int] = set()
    for x in colorful:
        while _two_color_hits(g, x, S) < 2:
            have = {("none", eid) if g.edges[eid].color is None else g.edges[eid].color
                    for eid, y in g.out_adj[x] if y in S}
            options = []
            for eid, y in g.out_adj[x]:
                c = g.edges[eid].color
                key = ("none", eid) if c is None else c
                if y != x and y not in S and key not in have:
                    options.append((-weight[y], y))
            if not options:
                raise AssertionError(f"colorful vertex {x} cannot reach two colors")
            S.add(min(options)[1])
    return S


def build_1cft_plus2_spanner_detailed(g: ColoredGraph, metric: TieBrokenMetric, ell: Optional[int] = None,
                                      *, mode=None, seed: int = 0) -> SpannerBuild:
    if g.directed or not g.unweighted:
        raise ValueError("+2 spanners are defined for unweighted undirected graphs")
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    if ell is None:
        ell = spanner_ell(g.n, g.delta)
    colorful = frozenset(v for v in range(g.n) if incident_colors(g, v) >= ell)
    dull_edges = frozenset(eid for v in range(g.n) if v not in colorful for eid, _ in g.out_adj[v])
    max_dull = max((len(g.out_adj[v]) for v in range(g.n) if v not in colorful), default=0)
    if max_dull > ell * max(g.delta, 1):
        raise AssertionError(f"dull vertex of degree {max_dull} exceeds ell * delta")
    S = frozenset(two_color_sources(g, colorful))
    src: frozenset = frozenset()
    if S:
        kw = {} if mode is None else {"mode": mode}
        src = construct_1cft_sourcewise(g, metric, S, seed=seed, **kw).subgraph.edge_ids
    H = Subgraph(g, dull_edges | src)
    return SpannerBuild(H, ell, colorful, S, dull_edges, src, max_dull)


def build_1cft_plus2_spanner(g: ColoredGraph, metric: TieBrokenMetric, ell: Optional[int] = None, **kw) -> Subgraph:
    return build_1cft_plus2_spanner_detailed(g, metric, ell, **kw).subgraph


def check_spanner(g: ColoredGraph, h: Subgraph):
    return verify_additive_stretch(g, h, stretch=2, f=1, mode=FaultMode.COLOR)
