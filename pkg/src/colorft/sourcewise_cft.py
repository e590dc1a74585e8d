"""1-color-fault-tolerant S x V distance preservers for unweighted graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graph import ColoredGraph, FaultMode, Subgraph
from .hitting import HittingFamily, HittingMode, build_hitting_family, suffix_length
from .paths import TieBrokenMetric


def snap(x: float, tol: float = 1e-9) -> float:
    """Round values within relative ``tol`` of an integer onto it (64 ** (2/3) -> 16)."""
    r = round(x)
    return float(r) if r != 0 and abs(x - r) <= tol * abs(r) else x


@dataclass(frozen=True)
class ThresholdSchedule:
    delta: int
    base: float
    n: int
    values: tuple[float, ...]  # d_0 = inf, d_1 .. d_delta, d_{delta+1} = 1

    @property
    def interior(self) -> list[float]:
        return list(self.values[1:-1])

    def suffix(self, i: int) -> int:
        return suffix_length(self.values[i], self.n)

    def levels(self) -> list[float]:
        """Interior thresholds with exact repeats removed.

        Equal thresholds give equal hitting families and subsumed rule-2
        additions, so dropping the repeats leaves the output unchanged.
        """
        out: list[float] = []
        for d in self.interior:
            if not out or d < out[-1]:
                out.append(d)
        return out

    @classmethod
    def from_base(cls, base: float, n: int, delta: int) -> "ThresholdSchedule":
        """d_i = base^(1 - i/(delta+1)), clamped to at least 1."""
        interior = [max(snap(base ** (1 - i / (delta + 1))), 1.0) for i in range(1, delta + 1)]
        return cls(delta, base, n, (math.inf, *interior, 1.0))


def cft_thresholds(n: int, sigma: int, delta: int) -> ThresholdSchedule:
    if n < 2 or not 1 <= sigma <= n or delta < 0:
        raise ValueError("need n >= 2, 1 <= sigma <= n, delta >= 0")
    return ThresholdSchedule.from_base((n / sigma) * math.log(n), n, delta)


@dataclass
class SourcewiseBuild:
    subgraph: Subgraph
    hitting: HittingFamily
    level_thresholds: list[float]   # d for A_0 .. A_k (d_0 = inf)
    suffix_lengths: list[int]       # rule-2 suffix length used at each level
    rule1_additions: int
    rule2_additions: int

    @property
    def size_bound(self) -> int:
        """Sum over t and levels of |A_i| * (1 + suffix length)."""
        n = self.subgraph.parent.n
        return n * sum(len(a) * (1 + L) for a, L in zip(self.hitting.sets, self.suffix_lengths))


def construct_1cft_sourcewise(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    sources: Iterable[int],
    *,
    thresholds: Optional[Sequence[float]] = None,
    mode: HittingMode = HittingMode.GREEDY,
    seed: int = 0,
) -> SourcewiseBuild:
    """Rules R1/R2 over the hitting levels A_0 = S, A_1, ..., A_k.

    ``thresholds`` overrides the interior schedule d_1 > ... > d_k (mainly for
    tests that want small thresholds on small graphs).
    """
    if not g.unweighted:
        raise ValueError("1-CFT sourcewise preservers are defined for unweighted graphs")
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    S = sorted(set(sources))
    if not S:
        raise ValueError("source set must be nonempty")
    if thresholds is None:
        levels = cft_thresholds(max(g.n, 2), len(S), g.delta).levels()
    else:
        levels = [float(d) for d in thresholds]
    hitting = build_hitting_family(g, metric, S, levels, mode, seed, fault_mode=FaultMode.COLOR)
    nexts = levels + [1.0]
    suffix_lengths = [suffix_length(d, g.n) for d in nexts]

    H: set[int] = set()
    r1 = r2 = 0
    color_edges = g.color_index
    for A, L in zip(hitting.sets, suffix_lengths):
        for a in sorted(A):
            tree = metric.tree(a)
            faulted: dict[str, object] = {}
            for t in tree.reachable():
                if t == a:
                    continue
                H.add(tree.parent[t])
                r1 += 1
                colors = {g.edges[e].color for e in tree.suffix_edges(t, L)} - {None}
                for c in sorted(colors):
                    tc = faulted.get(c)
                    if tc is None:
                        tc = faulted[c] = tree.without(color_edges[c])
                    if tc.key[t] is not None:
                        H.add(tc.parent[t])
                    r2 += 1
    return SourcewiseBuild(Subgraph(g, frozenset(H)), hitting, [math.inf] + levels, suffix_lengths, r1, r2)


def build_1cft_sourcewise(g: ColoredGraph, metric: TieBrokenMetric, sources: Iterable[int], **kw) -> Subgraph:
    return construct_1cft_sourcewise(g, metric, sources, **kw).subgraph


def obvious_preserver(g: ColoredGraph, metric: TieBrokenMetric, sources: Iterable[int]) -> set[int]:
    """Union of pi(s, t) and pi(s, t | c) over s, t and every color, by full recomputation."""
    out: set[int] = set()
    for s in set(sources):
        out |= metric.tree(s).tree_edges()
        for c in g.colors:
            out |= metric.tree(s, g.color_index[c]).tree_edges()
    return out
