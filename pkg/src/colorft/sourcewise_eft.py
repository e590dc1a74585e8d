"""Recursive f-edge-fault-tolerant S x V distance preservers for unweighted graphs."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .graph import ColoredGraph, FaultMode, Subgraph
from .hitting import HittingMode, build_hitting_family, suffix_length
from .paths import ShortestPathTree, TieBrokenMetric


@dataclass(frozen=True)
class EftThresholds:
    f: int
    base: float
    n: int
    values: tuple[float, ...]  # d_1 .. d_f

    def suffix(self, i: int) -> int:
        """Suffix length for d_i (1-based)."""
        return suffix_length(self.values[i - 1], self.n)

    def __len__(self) -> int:
        return self.f

    @classmethod
    def from_base(cls, base: float, n: int, f: int) -> "EftThresholds":
        """d_i = base^(1/2^i), each clamped to at least 1."""
        values, d = [], base
        for _ in range(f):
            # repeated square roots keep perfect powers exact (256 -> 16 -> 4 -> 2)
            d = math.sqrt(d)
            values.append(max(d, 1.0))
        return cls(f, base, n, tuple(values))


def eft_thresholds(n: int, sigma: int, f: int) -> EftThresholds:
    """Thresholds for base = (n/sigma) ln n."""
    if n < 2 or not 1 <= sigma <= n or f < 0:
        raise ValueError("need n >= 2, 1 <= sigma <= n, f >= 0")
    return EftThresholds.from_base((n / sigma) * math.log(n), n, f)


class TreeCache:
    """Replacement trees of one source keyed by edge fault set, grown one edge at a time."""

    def __init__(self, metric: TieBrokenMetric, source: int):
        self.metric = metric
        self.source = source
        self.trees: dict[frozenset, ShortestPathTree] = {frozenset(): metric.tree(source)}

    def extend(self, F: frozenset, e: int) -> tuple[frozenset, ShortestPathTree]:
        F2 = F | {e}
        t = self.trees.get(F2)
        if t is None:
            t = self.trees[F2] = self.trees[F].without((e,))
        return F2, t

    def __getitem__(self, F: frozenset) -> ShortestPathTree:
        return self.trees[F]


@dataclass
class NearGeneration:
    s: int
    t: int
    # fault set -> (edge sequence, threshold permutation) of its first generation
    fault_sets: dict[frozenset, tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=dict)
    e_near: set[int] = field(default_factory=set)
    generated: int = 0  # sequences produced, before deduplication

    def choice_bound(self, suffix_lengths: Sequence[int]) -> int:
        """Sum over k and permutations of the product of suffix lengths."""
        total = 0
        for k in range(len(suffix_lengths) + 1):
            for perm in itertools.permutations(range(k)):
                total += math.prod(suffix_lengths[p] for p in perm)
        return total


def generate_near_sets(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    s: int,
    t: int,
    thresholds: "EftThresholds | Sequence[float]",
    cache: Optional[TreeCache] = None,
) -> NearGeneration:
    """Run the near-set generation process for (s, t).

    For each k and each permutation p of the first k thresholds, e_i ranges
    over the ceil(d_{p(i)})-suffix of pi(s, t | e_1 .. e_{i-1}). Every
    generated F contributes LastE(s, t | F) when t stays reachable.
    """
    values = thresholds.values if isinstance(thresholds, EftThresholds) else tuple(thresholds)
    lengths = [suffix_length(d, g.n) for d in values]
    if cache is None:
        cache = TreeCache(metric, s)
    out = NearGeneration(s, t)

    def record(F, seq, perm, tree):
        out.generated += 1
        if F not in out.fault_sets:
            out.fault_sets[F] = (seq, perm)
            if tree.key[t] is not None and t != s:
                out.e_near.add(tree.parent[t])

    def grow(F, seq, perm, tree):
        i = len(seq)
        if i == len(perm):
            record(F, seq, perm, tree)
            return
        if tree.key[t] is None:
            return
        for e in tree.suffix_edges(t, lengths[perm[i]]):
            F2, t2 = cache.extend(F, e)
            grow(F2, seq + (e,), perm, t2)

    for k in range(len(values) + 1):
        for perm in itertools.permutations(range(k)):
            grow(frozenset(), (), perm, cache[frozenset()])
    return out


@dataclass
class EftBuild:
    subgraph: Subgraph
    f: int
    thresholds: Optional[EftThresholds]
    hitting_sets: list[frozenset]           # A_1 .. A_f
    children: list["EftBuild"]              # H_1 .. H_f
    e_near: frozenset
    generated: int                          # sequences produced by the generation process
    generation_bound: int                   # sum over (s, t) of the choice bound
    verified_hitting: bool = True

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)


def construct_feft_sourcewise(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    sources: Iterable[int],
    f: int,
    *,
    thresholds: Optional[Sequence[float]] = None,
    mode: HittingMode = HittingMode.GREEDY,
    seed: int = 0,
) -> EftBuild:
    """H = H_1 u ... u H_f u E_near, with H_i an (f-i)-EFT A_i x V preserver.

    ``thresholds`` overrides d_1 .. d_f at the top level only; recursive levels
    use the schedule for their own source count.
    """
    if not g.unweighted:
        raise ValueError("f-EFT sourcewise preservers are defined for unweighted graphs")
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    if f < 0:
        raise ValueError("fault budget must be nonnegative")
    S = sorted(set(sources))
    if not S:
        raise ValueError("source set must be nonempty")
    if f == 0:
        H: set[int] = set()
        for s in S:
            H |= metric.tree(s).tree_edges()
        return EftBuild(Subgraph(g, frozenset(H)), 0, None, [], [], frozenset(H), len(S) * g.n, len(S) * g.n)

    if thresholds is None:
        sched = eft_thresholds(max(g.n, 2), len(S), f)
    else:
        if len(thresholds) != f:
            raise ValueError(f"need exactly {f} thresholds")
        sched = EftThresholds(f, math.nan, g.n, tuple(float(d) for d in thresholds))

    # equal (clamped) thresholds share one hitting set
    distinct = sorted(set(sched.values), reverse=True)
    fam = build_hitting_family(g, metric, S, distinct, mode, seed, fault_mode=FaultMode.EDGE, f=f)
    by_value = dict(zip(distinct, fam.sets[1:]))
    A = [by_value[d] for d in sched.values]

    children = [
        construct_feft_sourcewise(g, metric, A[i - 1], f - i, mode=mode, seed=seed) if A[i - 1]
        else EftBuild(Subgraph(g, frozenset()), f - i, None, [], [], frozenset(), 0, 0)
        for i in range(1, f + 1)
    ]
    lengths = [sched.suffix(i) for i in range(1, f + 1)]
    e_near: set[int] = set()
    generated = bound = 0
    for s in S:
        cache = TreeCache(metric, s)
        for t in range(g.n):
            if t == s:
                continue
            gen = generate_near_sets(g, metric, s, t, sched, cache)
            e_near |= gen.e_near
            generated += gen.generated
            bound += gen.choice_bound(lengths)
    if generated > bound:
        raise AssertionError(f"generation produced {generated} sequences, bound {bound}")
    H = set(e_near)
    for c in children:
        H |= c.subgraph.edge_ids
    verified = fam.verified and all(c.verified_hitting for c in children)
    return EftBuild(Subgraph(g, frozenset(H)), f, sched, A, children, frozenset(e_near),
                    generated, bound, verified)


def build_feft_sourcewise(g: ColoredGraph, metric: TieBrokenMetric, sources: Iterable[int], f: int, **kw) -> Subgraph:
    return construct_feft_sourcewise(g, metric, sources, f, **kw).subgraph
