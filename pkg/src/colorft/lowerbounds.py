"""Extremal instances: colored trees with a unique surviving leaf per color, and the
graphs built on them in which every edge of X x Y must be kept."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .graph import ColoredGraph, FaultMode, FaultSet, GraphFormatError, GraphView

# ------------------------------------------------------------------ trees


class _Builder:
    """Vertex and color allocator shared by one recursive construction."""

    def __init__(self, color_prefix: str = "c"):
        self.n = 0
        self.edges: list[tuple[int, int, Optional[str]]] = []
        self.prefix = color_prefix
        self.colors = 0

    def vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def color(self) -> str:
        self.colors += 1
        return f"{self.prefix}{self.colors - 1}"

    def path(self, start: int, end: Optional[int], length: int, colors: Sequence[Optional[str]] = ()) -> int:
        """Add a path of ``length`` edges from ``start``; returns its last vertex (``end`` if given)."""
        colors = list(colors) + [None] * (length - len(colors))
        x = start
        for k in range(length):
            y = end if k == length - 1 and end is not None else self.vertex()
            self.edges.append((x, y, colors[k]))
            x = y
        return x


@dataclass(frozen=True)
class ColoredTreeInstance:
    graph: ColoredGraph
    root: int
    leaves: tuple[int, ...]
    leaf_color: dict
    family: str                 # "T(delta,q)" or "T(delta)"
    delta: int
    q: Optional[int] = None

    @property
    def expected_leaves(self) -> int:
        return self.q ** self.delta if self.q is not None else 2 ** self.delta

    @property
    def expected_edges(self) -> int:
        if self.q is None:
            return self.delta * 2 ** self.delta
        q, d = self.q, self.delta
        # d * (q^(d+1) - q^(d-1)), written to stay integral at d = 0
        return 0 if d == 0 else d * (q ** (d + 1) - q ** (d - 1))

    @property
    def depth_bounds(self) -> tuple[int, int]:
        if self.q is None:
            return (2 ** self.delta - 1,) * 2
        low = self.q ** self.delta - 1
        return low, 2 * low


def _t_dq(b: _Builder, delta: int, q: int):
    if delta == 0:
        v = b.vertex()
        return v, [v], {v: b.color()}
    subs = [_t_dq(b, delta - 1, q) for _ in range(q)]
    width = q ** (delta - 1)
    u = []
    for i, (r_i, _, _) in enumerate(subs, start=1):
        length = 2 * (q - i) * width
        start = r_i if length == 0 else b.vertex()
        if length:
            b.path(start, r_i, length)
        u.append(start)
    leaves: list[int] = []
    colors: dict[int, str] = {}
    for i, (_, lv, lc) in enumerate(subs):
        leaves.extend(lv)
        colors.update(lc)
        if i < q - 1:
            b.path(u[i], u[i + 1], width, [lc[v] for v in lv])
    return u[0], leaves, colors


def _t_binary(b: _Builder, delta: int):
    if delta == 0:
        v = b.vertex()
        return v, [v], {v: b.color()}
    halves = [_t_binary(b, delta - 1) for _ in range(2)]
    r = b.vertex()
    length = 2 ** (delta - 1)
    for i in (0, 1):
        other_leaves, other_colors = halves[1 - i][1], halves[1 - i][2]
        b.path(r, halves[i][0], length, [other_colors[v] for v in other_leaves])
    leaves = halves[0][1] + halves[1][1]
    return r, leaves, {**halves[0][2], **halves[1][2]}


def _relabel_bfs(n: int, edges, root: int) -> dict[int, int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for x, y, _ in edges:
        adj[x].append(y)
        adj[y].append(x)
    order = {root: 0}
    q = deque([root])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in order:
                order[y] = len(order)
                q.append(y)
    return order


def _finish_tree(b: _Builder, root, leaves, colors, family, delta, q, directed) -> ColoredTreeInstance:
    lab = _relabel_bfs(b.n, b.edges, root)
    edges = [(lab[x], lab[y], 1, c) for x, y, c in b.edges]
    g = ColoredGraph(b.n, edges, directed=directed)
    return ColoredTreeInstance(g, 0, tuple(lab[v] for v in leaves),
                               {lab[v]: c for v, c in colors.items()}, family, delta, q)


def build_tree_T_dq(delta: int, q: int, *, color_prefix: str = "c") -> ColoredTreeInstance:
    """Tree whose leaves each have a color leaving them the unique shallowest survivor."""
    if delta < 0 or q < 2:
        raise ValueError("need delta >= 0 and q >= 2")
    b = _Builder(color_prefix)
    root, leaves, colors = _t_dq(b, delta, q)
    return _finish_tree(b, root, leaves, colors, "T(delta,q)", delta, q, directed=False)


def build_tree_binary(delta: int, *, directed: bool = False, color_prefix: str = "c") -> ColoredTreeInstance:
    """Tree with 2^delta leaves; failing a leaf's color cuts off every other leaf."""
    if delta < 0:
        raise ValueError("need delta >= 0")
    b = _Builder(color_prefix)
    root, leaves, colors = _t_binary(b, delta)
    return _finish_tree(b, root, leaves, colors, "T(delta)", delta, None, directed)


# ------------------------------------------------------------------ instances


@dataclass
class LowerBoundInstance:
    kind: str
    graph: ColoredGraph
    mode: str                              # "distance" | "reachability" | "flow"
    sources: list[int]
    targets: Optional[list[int]] = None    # None: every vertex
    lam: Optional[int] = None
    mandatory_edges: list[tuple[int, FaultSet]] = field(default_factory=list)
    expected_mandatory: Optional[int] = None
    params: dict = field(default_factory=dict)


def integer_root(x: int, k: int) -> int:
    """floor(x ** (1/k)) for nonnegative integers, exact."""
    if x < 0 or k < 1:
        raise ValueError("need x >= 0 and k >= 1")
    r = int(round(x ** (1.0 / k)))
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def sourcewise_q(n: int, sigma: int, delta: int) -> int:
    """floor((n / (sigma * delta)) ** (1 / (delta + 1)))."""
    return integer_root(n // (sigma * delta), delta + 1)


def build_sourcewise_lb(sigma: int, delta: int, n: int) -> LowerBoundInstance:
    """sigma color-disjoint copies of T(delta, q) with all leaves joined to n new vertices."""
    if sigma < 1 or delta < 1 or n < 1:
        raise ValueError("need sigma >= 1, delta >= 1, n >= 1")
    q = sourcewise_q(n, sigma, delta)
    if q < 2:
        raise ValueError(f"q = floor((n/(sigma*delta))^(1/(delta+1))) = {q} < 2")
    edges, roots, leaves, leaf_color = [], [], [], {}
    offset = 0
    for copy in range(sigma):
        t = build_tree_T_dq(delta, q, color_prefix=f"t{copy}c")
        for e in t.graph.edges:
            edges.append((e.tail + offset, e.head + offset, 1, e.color))
        roots.append(t.root + offset)
        for v in t.leaves:
            leaves.append(v + offset)
            leaf_color[v + offset] = t.leaf_color[v]
        offset += t.graph.n
    ys = list(range(offset, offset + n))
    mandatory = []
    for x in leaves:
        for y in ys:
            mandatory.append((len(edges), FaultSet.colors(leaf_color[x], budget=1)))
            edges.append((x, y, 1, None))
    g = ColoredGraph(offset + n, edges, directed=False)
    return LowerBoundInstance("sourcewise-lb", g, "distance", roots, None, None, mandatory,
                              n * sigma * q ** delta, {"sigma": sigma, "delta": delta, "n": n, "q": q})


def split_colors(g: ColoredGraph, f: int) -> tuple[list[Optional[str]], dict[str, list[str]]]:
    """Split each class round-robin (by edge id) into f parts named <c>_1 .. <c>_f."""
    new: list[Optional[str]] = [e.color for e in g.edges]
    for c, ids in g.color_index.items():
        for k, eid in enumerate(sorted(ids)):
            new[eid] = f"{c}_{k % f + 1}"
    parts = {c: [f"{c}_{j}" for j in range(1, f + 1)] for c in g.color_index}
    return new, parts


def _split_tree(delta: int, f: int, prefix: str):
    t = build_tree_binary(f * delta, directed=True, color_prefix=prefix)
    colors, _ = split_colors(t.graph, f)
    witness = {v: [f"{t.leaf_color[v]}_{j}" for j in range(1, f + 1)] for v in t.leaves}
    return t, colors, witness


def build_reachability_lb(n: int, delta: int, f: int) -> LowerBoundInstance:
    """T(f*delta) directed away from its root, classes split f ways, leaves -> n new vertices."""
    if f < 1 or delta < 0 or n < 1:
        raise ValueError("need f >= 1, delta >= 0, n >= 1")
    if f * delta * 2 ** (f * delta) > n:
        raise ValueError("need f * delta * 2^(f * delta) <= n")
    t, colors, witness = _split_tree(delta, f, "c")
    edges = [(e.tail, e.head, 1, c) for e, c in zip(t.graph.edges, colors)]
    ys = range(t.graph.n, t.graph.n + n)
    mandatory = []
    for x in t.leaves:
        for y in ys:
            mandatory.append((len(edges), FaultSet.colors(*witness[x], budget=f)))
            edges.append((x, y, 1, None))
    g = ColoredGraph(t.graph.n + n, edges, directed=True)
    return LowerBoundInstance("reachability-lb", g, "reachability", [t.root], None, None, mandatory,
                              2 ** (f * delta) * n, {"n": n, "delta": delta, "f": f})


def build_flow_lb(n: int, delta: int, f: int, lam: int) -> LowerBoundInstance:
    """lam color-disjoint split trees hung below a source of out-degree lam."""
    if f < 1 or delta < 0 or n < 1 or lam < 1:
        raise ValueError("need f >= 1, delta >= 0, n >= 1, lam >= 1")
    if lam * f * delta * 2 ** (f * delta) > n:
        raise ValueError("need lam * f * delta * 2^(f * delta) <= n")
    s = 0
    edges, leaves, witness = [], [], {}
    offset = 1
    for copy in range(lam):
        t, colors, wit = _split_tree(delta, f, f"t{copy}c")
        edges.append((s, t.root + offset, 1, None))
        for e, c in zip(t.graph.edges, colors):
            edges.append((e.tail + offset, e.head + offset, 1, c))
        for v in t.leaves:
            leaves.append(v + offset)
            witness[v + offset] = wit[v]
        offset += t.graph.n
    mandatory = []
    for x in leaves:
        for y in range(offset, offset + n):
            mandatory.append((len(edges), FaultSet.colors(*witness[x], budget=f)))
            edges.append((x, y, 1, None))
    g = ColoredGraph(offset + n, edges, directed=True)
    return LowerBoundInstance("flow-lb", g, "flow", [s], None, lam, mandatory,
                              lam * 2 ** (f * delta) * n, {"n": n, "delta": delta, "f": f, "lam": lam})


def _pair_distance(g: ColoredGraph, u: int, dead=frozenset()):
    from .verify import distances  # verifier holds the plain Dijkstra
    return distances(GraphView(g, frozenset(dead)), u)


def build_singlepair_lb(gstar: ColoredGraph, pstar: Sequence[tuple[int, int]]) -> LowerBoundInstance:
    """Chains u_1..u_{N+1}, v_1..v_{N+1} around gstar; failing c_i forces the x_i -> y_i route.

    Connector i weighs N - i for i < N; the last connector gets the chain
    epsilon instead of weight 0, which keeps every weight positive.
    """
    if gstar.directed:
        raise ValueError("gstar must be undirected")
    if any(e.color is not None for e in gstar.edges):
        raise ValueError("gstar must be uncolored")
    pairs = list(dict.fromkeys((int(x), int(y)) for x, y in pstar))
    if not pairs:
        raise ValueError("need at least one pair")
    N, n0 = len(pairs), gstar.n
    dist = [_pair_distance(gstar, u) for u in range(n0)]
    for x, y in pairs:
        if dist[x][y] is None:
            raise ValueError(f"pair ({x}, {y}) is disconnected in gstar; cannot rescale")
    maxd = max((d for row in dist for d in row if d is not None), default=0)
    factor = Fraction(1, 2) * gstar.scale / maxd if maxd else Fraction(1)
    m_total = gstar.m + 4 * N
    eps = Fraction(1, 4 * (n0 + 2 * N + 2) * (m_total + 1))
    edges = [(e.tail, e.head, e.weight * factor, None) for e in gstar.edges]
    u = [None] + [n0 + i for i in range(N + 1)]              # u[1..N+1]
    v = [None] + [n0 + N + 1 + i for i in range(N + 1)]      # v[1..N+1]
    for i, (x, y) in enumerate(pairs, start=1):
        w = Fraction(N - i) if i < N else eps
        edges.append((u[i], x, w, None))
        edges.append((y, v[i], w, None))
        edges.append((u[i], u[i + 1], eps, f"c{i}"))
        edges.append((v[i], v[i + 1], eps, f"c{i}"))
    g = ColoredGraph(n0 + 2 * (N + 1), edges, directed=False)

    mandatory = []
    for e in gstar.edges:
        for i, (x, y) in enumerate(pairs, start=1):
            d_cut = _pair_distance(gstar, x, {e.id})[y]
            if d_cut is None or d_cut > dist[x][y]:
                mandatory.append((e.id, FaultSet.colors(f"c{i}", budget=1)))
                break
    return LowerBoundInstance("singlepair-lb", g, "distance", [u[1]], [v[1]], None, mandatory,
                              len(mandatory), {"pairs": N, "gstar_n": n0, "scale": factor, "eps": eps})


# ------------------------------------------------------------------ manifest format


def format_manifest(inst: LowerBoundInstance) -> str:
    lines = ["cftm 1", f"kind {inst.kind}"]
    lines.append(f"mode {inst.mode}" + (f" {inst.lam}" if inst.lam is not None else ""))
    lines.append("sources " + ",".join(map(str, inst.sources)))
    lines.append("targets " + ("all" if inst.targets is None else ",".join(map(str, inst.targets))))
    budget = max((F.budget or len(F) for _, F in inst.mandatory_edges), default=0)
    lines.append(f"budget {budget}")
    for e, F in inst.mandatory_edges:
        lines.append(f"m {e} {','.join(sorted(F.members)) or '-'}")
    return "\n".join(lines) + "\n"


def parse_manifest(text: str, graph: ColoredGraph) -> LowerBoundInstance:
    fields: dict[str, list[str]] = {}
    mandatory = []
    budget = None
    lines = text.splitlines()
    if not lines or lines[0].strip() != "cftm 1":
        raise GraphFormatError("expected header 'cftm 1'", 1)
    for lineno, raw in enumerate(lines[1:], start=2):
        tok = raw.split()
        if not tok:
            continue
        if tok[0] == "m":
            if len(tok) != 3:
                raise GraphFormatError("expected 'm <edge-id> <color>[,<color>...]'", lineno)
            colors = [] if tok[2] == "-" else tok[2].split(",")
            mandatory.append((int(tok[1]), FaultSet(FaultMode.COLOR, frozenset(colors), budget)))
        elif tok[0] == "budget":
            budget = int(tok[1]) or None
        else:
            fields[tok[0]] = tok[1:]
    try:
        mode = fields["mode"]
        targets = fields["targets"][0]
        return LowerBoundInstance(
            fields["kind"][0], graph, mode[0],
            [int(x) for x in fields["sources"][0].split(",")],
            None if targets == "all" else [int(x) for x in targets.split(",")],
            int(mode[1]) if len(mode) > 1 else None,
            mandatory, len(mandatory))
    except (KeyError, IndexError, ValueError) as exc:
        raise GraphFormatError(f"incomplete manifest: {exc}") from None


def vertex_count_ratio(inst: LowerBoundInstance) -> float:
    return inst.graph.n / inst.params["n"]


