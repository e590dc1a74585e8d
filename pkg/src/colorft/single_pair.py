"""1-color-fault-tolerant single-pair distance preservers for weighted undirected graphs.

Built from two shortest-path trees, the interleaving edges of each restored
path, and a plain pairwise preserver over the interior segments.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import ColoredGraph, Subgraph
from .paths import Path, TieBrokenMetric, make_metric



def perturb_weights(g: ColoredGraph, seed: int = 0, max_retries: int = 16) -> TieBrokenMetric:
    """Seeded perturbation with all-pairs uniqueness checked; reseeds on a tie."""
    return make_metric(g, seed, verify=True, max_retries=max_retries)


def build_pairwise_dp(g: ColoredGraph, metric: TieBrokenMetric, pairs: Iterable[tuple[int, int]]) -> Subgraph:
    """Union of the unique shortest paths of the given pairs (no faults)."""
    H: set[int] = set()
    for x, y in pairs:
        H.update(metric.tree(x).path(y).edges)
    return Subgraph(g, frozenset(H))


@dataclass(frozen=True)
class Decomposition:
    path: Path
    segments: tuple[tuple[int, ...], ...]       # edge ids of each shortest-path segment
    endpoints: tuple[tuple[int, int], ...]      # (v_i, u_i) per segment
    interleaving: tuple[int, ...]               # e_1 .. e_l

    @property
    def ell(self) -> int:
        return len(self.interleaving)

    @property
    def E(self) -> frozenset:
        return frozenset(self.interleaving)

    @property
    def P(self) -> tuple[tuple[int, int], ...]:
        """Interior segment endpoints (v_i, u_i) for 1 <= i <= l - 1."""
        return self.endpoints[1:-1]

    def edges(self) -> tuple[int, ...]:
        out: list[int] = list(self.segments[0])
        for e, seg in zip(self.interleaving, self.segments[1:]):
            out.append(e)
            out.extend(seg)
        return tuple(out)


def restoration_decompose(g: ColoredGraph, metric: TieBrokenMetric, path: Path, k: int | None = None) -> Decomposition:
    """Greedy maximal-prefix split of ``path`` into fault-free shortest segments and single edges.

    Each segment is extended while it equals the unique fault-free shortest
    path between its endpoints; the first edge that breaks this becomes an
    interleaving edge. Greedy is optimal because subpaths of unique shortest
    paths are unique shortest paths. With ``k`` given, more than k
    interleaving edges raises.
    """
    if not path.reachable:
        raise ValueError("cannot decompose an unreachable path")
    verts, edges = path.vertices, path.edges
    segments, endpoints, inter = [], [], []
    i = 0
    while True:
        start = verts[i]
        tree = metric.tree(start)
        j = i
        while j < len(edges) and tree.parent[verts[j + 1]] == edges[j] and tree.pred[verts[j + 1]] == verts[j]:
            j += 1
        segments.append(tuple(edges[i:j]))
        endpoints.append((start, verts[j]))
        if j == len(edges):
            break
        inter.append(edges[j])
        i = j + 1
    d = Decomposition(path, tuple(segments), tuple(endpoints), tuple(inter))
    if d.edges() != edges:
        raise AssertionError("decomposition does not reproduce the path")
    if k is not None and d.ell > k:
        raise AssertionError(f"{d.ell} interleaving edges exceed the {k} failed edges")
    return d


@dataclass
class SinglePairBuild:
    subgraph: Subgraph
    s: int
    t: int
    tree_s: frozenset
    tree_t: frozenset
    e_union: frozenset
    dp: Subgraph
    decompositions: dict  # color -> Decomposition (reachable replacement paths only)

    @property
    def accounting_bound(self) -> int:
        return len(self.tree_s) + len(self.tree_t) + len(self.e_union) + len(self.dp)


def construct_1cft_single_pair(g: ColoredGraph, metric: TieBrokenMetric, s: int, t: int) -> SinglePairBuild:
    """H = T_s u T_t u E(c) u DP(P(c)) over the colors c on pi(s, t)."""
    if g.directed:
        raise ValueError("single-pair construction needs an undirected graph")
    if metric.graph is not g:
        raise ValueError("metric was built for a different graph")
    ts = metric.tree(s)
    tt = metric.tree(t)
    base = ts.path(t)
    colors = sorted({g.edges[e].color for e in base.edges} - {None})
    decomps = {}
    e_union: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for c in colors:
        failed = g.color_index[c]
        p = metric.tree(s, failed).path(t)
        if not p.reachable:
            continue
        d = restoration_decompose(g, metric, p, k=len(failed))
        decomps[c] = d
        e_union |= d.E
        pairs.extend(d.P)
    dp = build_pairwise_dp(g, metric, pairs)
    H = ts.tree_edges() | tt.tree_edges() | e_union | dp.edge_ids
    out = SinglePairBuild(Subgraph(g, frozenset(H)), s, t, frozenset(ts.tree_edges()),
                          frozenset(tt.tree_edges()), frozenset(e_union), dp, decomps)
    if len(e_union) > g.delta * len(colors) or len(H) > out.accounting_bound:
        raise AssertionError("single-pair size accounting violated")
    return out


def build_1cft_single_pair(g: ColoredGraph, metric: TieBrokenMetric, s: int, t: int) -> Subgraph:
    return construct_1cft_single_pair(g, metric, s, t).subgraph


def decomposition_contained(h: Subgraph, metric: TieBrokenMetric, d: Decomposition) -> bool:
    """Each segment, interleaving edge and interior pair path lies inside H."""
    ids = h.edge_ids
    if not all(set(seg) <= ids for seg in d.segments) or not d.E <= ids:
        return False
    return all(set(metric.tree(x).path(y).edges) <= ids for x, y in d.P)


def decompose_all(g: ColoredGraph, metric: TieBrokenMetric, s: int, t: int) -> dict:
    """Decomposition of pi(s, t | c) for every color c (reachable ones only)."""
    out = {}
    for c in g.colors:
        p = metric.tree(s, g.color_index[c]).path(t)
        if p.reachable:
            out[c] = restoration_decompose(g, metric, p, k=len(g.color_index[c]))
    return out

