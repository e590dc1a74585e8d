"""Hitting sets for families of replacement-path suffixes."""
from __future__ import annotations

import heapq
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .graph import ColoredGraph, FaultMode
from .paths import ShortestPathTree, TieBrokenMetric


class HittingSetError(RuntimeError):
    pass


class HittingMode(Enum):
    GREEDY = "greedy"
    SAMPLED = "sampled"


def suffix_length(d: float, n: int) -> int:
    """Integer suffix length for a real threshold: ceil(d) clamped to [1, n]."""
    if math.isinf(d):
        return n
    return min(max(math.ceil(d), 1), max(n, 1))


@dataclass(frozen=True)
class SuffixFamily:
    sets: tuple[frozenset, ...]
    d: float

    def __post_init__(self):
        cap = math.inf if math.isinf(self.d) else math.ceil(self.d) + 1
        for s in self.sets:
            if not s:
                raise ValueError("suffix family members must be nonempty")
            if len(s) > cap:
                raise ValueError(f"member of size {len(s)} exceeds d + 1 = {cap}")

    def __len__(self) -> int:
        return len(self.sets)


@dataclass
class HittingFamily:
    sets: list[frozenset]          # A_0 = S, then A_1 .. A_k
    thresholds: list[float]        # d_0 = inf, then d_1 .. d_k
    mode: HittingMode
    seed: int
    verified: bool = True
    families: list[SuffixFamily] = field(default_factory=list, repr=False)

    def __getitem__(self, i: int) -> frozenset:
        return self.sets[i]

    def __len__(self) -> int:
        return len(self.sets)


def greedy_hitting_set(family: "SuffixFamily | Iterable[Iterable[int]]") -> set[int]:
    """Classical greedy: repeatedly take the vertex hitting most unhit members.

    Ties go to the smaller vertex id, so the result is deterministic.
    """
    sets = [frozenset(s) for s in (family.sets if isinstance(family, SuffixFamily) else family)]
    if any(not s for s in sets):
        raise ValueError("cannot hit an empty set")
    occurs: dict[int, list[int]] = defaultdict(list)
    for i, s in enumerate(sets):
        for v in s:
            occurs[v].append(i)
    count = {v: len(ix) for v, ix in occurs.items()}
    heap = [(-c, v) for v, c in count.items()]
    heapq.heapify(heap)
    alive = [True] * len(sets)
    remaining = len(sets)
    chosen: set[int] = set()
    while remaining:
        negc, v = heapq.heappop(heap)
        c = count[v]
        if -negc != c:
            if c > 0:
                heapq.heappush(heap, (-c, v))
            continue
        chosen.add(v)
        for i in occurs[v]:
            if alive[i]:
                alive[i] = False
                remaining -= 1
                for u in sets[i]:
                    count[u] -= 1
    return chosen


def first_unhit(hitting: Iterable[int], family: "SuffixFamily | Iterable[frozenset]") -> Optional[frozenset]:
    a = set(hitting)
    for s in family.sets if isinstance(family, SuffixFamily) else family:
        if a.isdisjoint(s):
            return frozenset(s)
    return None


def replacement_trees(
    metric: TieBrokenMetric, source: int, fault_mode: FaultMode, f: int = 1
) -> Iterator[tuple[ShortestPathTree, Iterable[int]]]:
    """Every distinct replacement tree of ``source``, with the vertices whose path changed.

    COLOR mode: the fault-free tree, then one tree per color on it. EDGE mode:
    all trees for fault sets built by repeatedly failing a current tree edge,
    up to ``f`` edges; this reaches pi(s, t | F) for every |F| <= f, since any F
    can be shrunk to a minimal set whose canonical order has that shape.
    """
    g = metric.graph
    base = metric.tree(source)
    yield base, base.reachable()
    if fault_mode is FaultMode.COLOR:
        colors = sorted({g.edges[e].color for e in base.tree_edges()} - {None})
        for c in colors:
            t = base.without(g.color_index[c])
            yield t, t.changed
        return
    seen = {frozenset()}
    stack = [(base, frozenset())]
    while stack:
        tree, F = stack.pop()
        if len(F) >= f:
            continue
        for e in sorted(tree.tree_edges()):
            F2 = F | {e}
            if F2 in seen:
                continue
            seen.add(F2)
            t2 = tree.without((e,))
            yield t2, t2.changed
            stack.append((t2, F2))


def suffix_families(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    sources: Iterable[int],
    thresholds: Sequence[float],
    fault_mode: FaultMode = FaultMode.COLOR,
    f: int = 1,
) -> list[SuffixFamily]:
    """One suffix family per threshold.

    COLOR mode requires hitting when dist > d, EDGE mode when dist >= d. A
    suffix contributes the vertices within ceil(d) edges of t, excluding t.
    """
    lengths = [suffix_length(d, g.n) for d in thresholds]
    strict = fault_mode is FaultMode.COLOR
    members: list[set[frozenset]] = [set() for _ in thresholds]
    for s in sorted(set(sources)):
        for tree, verts in replacement_trees(metric, s, fault_mode, f):
            for t in verts:
                if t == s or tree.key[t] is None:
                    continue
                dist = tree.dist(t)
                verts_up = None
                for i, d in enumerate(thresholds):
                    if dist > d if strict else dist >= d:
                        if verts_up is None:
                            verts_up = tree.suffix_vertices(t, max(lengths))
                        members[i].add(frozenset(verts_up[: lengths[i]]))
    return [SuffixFamily(tuple(sorted(m, key=sorted)), d) for m, d in zip(members, thresholds)]


def sampled_size(n: int, d: float) -> int:
    return min(n, math.ceil(4 * (n / d) * math.log(n))) if n > 1 else n


def build_hitting_family(
    g: ColoredGraph,
    metric: TieBrokenMetric,
    sources: Iterable[int],
    thresholds: Sequence[float],
    mode: HittingMode = HittingMode.GREEDY,
    seed: int = 0,
    *,
    fault_mode: FaultMode = FaultMode.COLOR,
    f: int = 1,
    exhaustive: Optional[bool] = None,
    retries: int = 20,
) -> HittingFamily:
    """A_0 = S, then A_i hitting the d_i-suffix family.

    In EDGE mode the family is enumerated exhaustively only for f <= 2 unless
    ``exhaustive`` says otherwise; without enumeration A_i is sampled and the
    result is flagged unverified.
    """
    thresholds = list(thresholds)
    if any(b >= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly decreasing")
    sources = frozenset(sources)
    if exhaustive is None:
        exhaustive = fault_mode is FaultMode.COLOR or f <= 2
    rng = random.Random(seed)
    if not exhaustive:
        sets = [sources] + [frozenset(rng.sample(range(g.n), sampled_size(g.n, d))) for d in thresholds]
        return HittingFamily(sets, [math.inf] + thresholds, HittingMode.SAMPLED, seed, verified=False)

    families = suffix_families(g, metric, sources, thresholds, fault_mode, f)
    sets = [sources]
    for fam in families:
        if mode is HittingMode.GREEDY:
            a = greedy_hitting_set(fam)
        else:
            size = sampled_size(g.n, fam.d)
            for _ in range(retries + 1):
                a = set(rng.sample(range(g.n), size))
                if first_unhit(a, fam) is None:
                    break
            else:
                raise HittingSetError(f"no sampled hitting set for d={fam.d} after {retries} retries")
        miss = first_unhit(a, fam)
        if miss is not None:
            raise HittingSetError(f"hitting set misses suffix {sorted(miss)}")
        sets.append(frozenset(a))
    return HittingFamily(sets, [math.inf] + thresholds, mode, seed, verified=True, families=families)
