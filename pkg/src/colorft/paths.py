"""Canonically tie-broken shortest paths.

Every edge weight is perturbed by a seeded amount small enough that no strict
inequality between original path weights can flip. Perturbed weights are kept
as exact integers over a common denominator, so ties are decidable: any tie
met during a search raises :class:`UniquenessViolation`.
"""
from __future__ import annotations

import heapq
import math
import random
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import ColoredGraph, FaultLike, dead_edges

PERTURB_BITS = 32
_GOLDEN = 0x9E3779B97F4A7C15


class UniquenessViolation(RuntimeError):
    """Two distinct paths have equal perturbed weight; the metric must be reseeded."""

    def __init__(self, source: int, vertex: int, seed: int):
        self.source, self.vertex, self.seed = source, vertex, seed
        super().__init__(f"tied shortest paths {source}->{vertex} under seed {seed}")


def reseed(seed: int, attempt: int) -> int:
    return (seed + attempt * _GOLDEN) % (1 << 64)


@dataclass(frozen=True)
class Path:
    u: int
    v: int
    edges: tuple[int, ...]
    vertices: tuple[int, ...]
    weight: object  # Fraction, or math.inf when unreachable

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def reachable(self) -> bool:
        return self.weight != math.inf

    def __len__(self) -> int:
        return len(self.edges)


class TieBrokenMetric:
    """Perturbed weights w'_e = w_e + r_e * delta with r_e in [0, 1).

    With all weights scaled to integers (gap 1), delta = 1 / (2 n (m + 1)), so
    the perturbation summed over any edge subset stays below half a unit.
    Keys are ``w_int * unit + r`` with ``r < 2**32``.
    """

    def __init__(self, g: ColoredGraph, seed: int, _keys: Optional[tuple[int, ...]] = None):
        self.graph = g
        self.seed = seed
        self.perturb_range = 1 << PERTURB_BITS
        self.unit = 2 * max(g.n, 1) * (g.m + 1) * self.perturb_range
        if _keys is None:
            rng = random.Random(seed)
            _keys = tuple(w * self.unit + rng.getrandbits(PERTURB_BITS) for w in g.int_weights)
        self.keys = _keys
        self.uniqueness_verified = False
        self._cache: OrderedDict = OrderedDict()
        self._cache_size = 4096

    @property
    def delta(self) -> Fraction:
        return Fraction(1, 2 * max(self.graph.n, 1) * (self.graph.m + 1) * self.graph.scale)

    def perturbed_weight(self, edge_id: int) -> Fraction:
        return Fraction(self.keys[edge_id], self.unit * self.graph.scale)

    def original(self, key: Optional[int]):
        """Original-weight distance encoded by a perturbed key."""
        if key is None:
            return math.inf
        q = key // self.unit
        return q if self.graph.scale == 1 else Fraction(q, self.graph.scale)

    def reversed(self) -> "TieBrokenMetric":
        if not self.graph.directed:
            return self
        rev = TieBrokenMetric(self.graph.reversed(), self.seed, _keys=self.keys)
        rev.uniqueness_verified = self.uniqueness_verified
        return rev

    def tree(self, source: int, faults: FaultLike = None) -> "ShortestPathTree":
        dead = dead_edges(self.graph, faults)
        k = (source, dead)
        hit = self._cache.get(k)
        if hit is not None:
            self._cache.move_to_end(k)
            return hit
        t = ShortestPathTree.build(self, source, dead)
        self._cache[k] = t
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return t

    def __repr__(self) -> str:
        return f"TieBrokenMetric(seed={self.seed}, verified={self.uniqueness_verified})"


def _search(metric, dead, key, parent, pred, hops, heap, tie, scope, source, targets=None):
    g = metric.graph
    adj = g.out_adj
    kw = metric.keys
    done = bytearray(g.n)
    remaining = None if targets is None else set(targets)
    while heap:
        k, v = heapq.heappop(heap)
        if done[v] or k != key[v]:
            continue
        done[v] = 1
        if tie[v]:
            raise UniquenessViolation(source, v, metric.seed)
        if remaining is not None:
            remaining.discard(v)
            if not remaining:
                break
        hv = hops[v] + 1
        for eid, w in adj[v]:
            if eid in dead or done[w] or (scope is not None and w not in scope):
                continue
            nk = k + kw[eid]
            cur = key[w]
            if cur is None or nk < cur:
                key[w] = nk
                parent[w] = eid
                pred[w] = v
                hops[w] = hv
                tie[w] = 0
                heapq.heappush(heap, (nk, w))
            elif nk == cur and parent[w] != eid:
                tie[w] = 1
    return remaining


class ShortestPathTree:
    """Tie-broken shortest-path tree of ``source`` in ``graph - dead``."""

    __slots__ = ("metric", "source", "dead", "key", "parent", "pred", "hops", "changed", "complete", "_children")

    def __init__(self, metric, source, dead, key, parent, pred, hops, changed, complete=True):
        self.metric = metric
        self.source = source
        self.dead = dead
        self.key = key
        self.parent = parent
        self.pred = pred
        self.hops = hops
        self.changed = changed
        self.complete = complete
        self._children = None

    @classmethod
    def build(cls, metric: TieBrokenMetric, source: int, dead: frozenset = frozenset(),
              targets: Optional[Iterable[int]] = None) -> "ShortestPathTree":
        n = metric.graph.n
        key: list = [None] * n
        parent: list = [None] * n
        pred: list = [None] * n
        hops = [0] * n
        tie = bytearray(n)
        key[source] = 0
        _search(metric, dead, key, parent, pred, hops, [(0, source)], tie, None, source, targets)
        return cls(metric, source, dead, key, parent, pred, hops, None, complete=targets is None)

    # -------------------------------------------------------------- queries
    def reached(self, v: int) -> bool:
        return self.key[v] is not None

    def dist(self, v: int):
        return self.metric.original(self.key[v])

    def last_edge(self, v: int) -> Optional[int]:
        return self.parent[v]

    def path(self, v: int) -> Path:
        if self.key[v] is None:
            return Path(self.source, v, (), (), math.inf)
        edges, verts = [], [v]
        x = v
        while x != self.source:
            edges.append(self.parent[x])
            x = self.pred[x]
            verts.append(x)
        edges.reverse()
        verts.reverse()
        return Path(self.source, v, tuple(edges), tuple(verts), self.dist(v))

    def suffix_vertices(self, v: int, k: int) -> list[int]:
        """Vertices of the k-suffix of the path to v, excluding v itself."""
        out = []
        x = v
        for _ in range(k):
            if x == self.source or self.key[x] is None:
                break
            x = self.pred[x]
            out.append(x)
        return out

    def suffix_edges(self, v: int, k: int) -> list[int]:
        """Last k edges of the path to v, nearest to v first."""
        out = []
        x = v
        for _ in range(k):
            if x == self.source or self.key[x] is None:
                break
            out.append(self.parent[x])
            x = self.pred[x]
        return out

    def tree_edges(self) -> set[int]:
        return {e for e in self.parent if e is not None}

    def reachable(self) -> list[int]:
        return [v for v in range(len(self.key)) if self.key[v] is not None]

    def children(self) -> list[list[int]]:
        if self._children is None:
            ch: list[list[int]] = [[] for _ in self.key]
            for v, p in enumerate(self.pred):
                if p is not None:
                    ch[p].append(v)
            self._children = ch
        return self._children

    def subtree(self, root: int) -> list[int]:
        ch = self.children()
        out, stack = [], [root]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(ch[x])
        return out

    def without(self, edge_ids: Iterable[int]) -> "ShortestPathTree":
        """Tree for the same source after also failing ``edge_ids``.

        Only the subtrees hanging below failed tree edges are recomputed; by
        stability every other vertex keeps its path.
        """
        if not self.complete:
            raise ValueError("incremental update needs a complete tree")
        extra = frozenset(edge_ids) - self.dead
        if not extra:
            return self
        g = self.metric.graph
        dead = self.dead | extra
        roots = []
        for eid in extra:
            e = g.edges[eid]
            for x in (e.head, e.tail):
                if self.parent[x] == eid:
                    roots.append(x)
        if not roots:
            return ShortestPathTree(self.metric, self.source, dead, self.key, self.parent,
                                    self.pred, self.hops, frozenset())
        affected: set[int] = set()
        for r in roots:
            if r not in affected:
                affected.update(self.subtree(r))
        key, parent, pred, hops = list(self.key), list(self.parent), list(self.pred), list(self.hops)
        for v in affected:
            key[v] = parent[v] = pred[v] = None
            hops[v] = 0
        tie = bytearray(g.n)
        kw = self.metric.keys
        heap = []
        for v in affected:
            for eid, u in g.in_adj[v]:
                if eid in dead or u in affected or key[u] is None:
                    continue
                nk = key[u] + kw[eid]
                cur = key[v]
                if cur is None or nk < cur:
                    key[v], parent[v], pred[v], hops[v] = nk, eid, u, hops[u] + 1
                    tie[v] = 0
                elif nk == cur and parent[v] != eid:
                    tie[v] = 1
            if key[v] is not None:
                heap.append((key[v], v))
        heapq.heapify(heap)
        _search(self.metric, dead, key, parent, pred, hops, heap, tie, affected, self.source)
        return ShortestPathTree(self.metric, self.source, dead, key, parent, pred, hops, frozenset(affected))


def spt(metric: TieBrokenMetric, source: int, faults: FaultLike = None) -> ShortestPathTree:
    return metric.tree(source, faults)


def shortest_path(g: ColoredGraph, metric: TieBrokenMetric, u: int, v: int, faults: FaultLike = None) -> Path:
    """The unique w'-shortest u->v path in g - F (empty, weight inf, if unreachable)."""
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    return metric.tree(u, faults).path(v)


def last_edge(g: ColoredGraph, metric: TieBrokenMetric, u: int, v: int, faults: FaultLike = None) -> Optional[int]:
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    return metric.tree(u, faults).last_edge(v)


def verify_uniqueness(metric: TieBrokenMetric, sources: Optional[Sequence[int]] = None) -> None:
    """Raise UniquenessViolation if any fault-free shortest path from ``sources`` is tied."""
    for s in range(metric.graph.n) if sources is None else sources:
        ShortestPathTree.build(metric, s)
    if sources is None:
        metric.uniqueness_verified = True


def make_metric(g: ColoredGraph, seed: int = 0, verify: bool = True, max_retries: int = 16) -> TieBrokenMetric:
    """Seeded metric; all-pairs uniqueness is checked and the seed rotated on collision."""
    for attempt in range(max_retries + 1):
        metric = TieBrokenMetric(g, reseed(seed, attempt))
        if not verify:
            return metric
        try:
            verify_uniqueness(metric)
        except UniquenessViolation:
            continue
        return metric
    raise UniquenessViolation(-1, -1, seed)


perturb_weights = make_metric
