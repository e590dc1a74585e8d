"""Edge-colored graphs, fault sets, live-edge views and the cftg text format."""
from __future__ import annotations

import hashlib
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Optional, Sequence, TextIO, Union

Color = Optional[str]  # None is the NONE color: never fails in COLOR mode


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    weight: Fraction
    color: Color = None

    def other(self, v: int) -> int:
        return self.head if v == self.tail else self.tail


class ColoredGraph:
    """Immutable edge-colored graph.

    Undirected edges are stored once and are traversable both ways. Parallel
    edges are kept distinct. ``delta`` is the largest color-class size.
    """

    def __init__(self, n: int, edges: Iterable[tuple], directed: bool = False):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        self.directed = directed
        built = []
        for i, spec in enumerate(edges):
            tail, head, weight, *rest = spec
            color = rest[0] if rest else None
            weight = Fraction(weight)
            if not (0 <= tail < n and 0 <= head < n):
                raise ValueError(f"edge {i}: endpoint out of range [0, {n})")
            if weight <= 0:
                raise ValueError(f"edge {i}: weight must be strictly positive")
            built.append(Edge(i, tail, head, weight, None if color is None else str(color)))
        self.edges: tuple[Edge, ...] = tuple(built)
        index: dict[str, list[int]] = defaultdict(list)
        for e in self.edges:
            if e.color is not None:
                index[e.color].append(e.id)
        self.color_index: dict[str, tuple[int, ...]] = {c: tuple(ids) for c, ids in index.items()}
        self.delta = max((len(ids) for ids in self.color_index.values()), default=0)

        # integer weights over a common denominator, shared by every distance routine
        self.scale = math.lcm(*(e.weight.denominator for e in self.edges)) if self.edges else 1
        self.int_weights = tuple(int(e.weight * self.scale) for e in self.edges)
        self.unweighted = all(e.weight == 1 for e in self.edges)

        out_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        in_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in self.edges:
            out_adj[e.tail].append((e.id, e.head))
            in_adj[e.head].append((e.id, e.tail))
            if not directed and e.tail != e.head:
                out_adj[e.head].append((e.id, e.tail))
                in_adj[e.tail].append((e.id, e.head))
        self.out_adj = tuple(tuple(a) for a in out_adj)
        self.in_adj = tuple(tuple(a) for a in in_adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def colors(self) -> list[str]:
        return sorted(self.color_index, key=_color_sort_key)

    def edges_of_colors(self, colors: Iterable[Hashable]) -> frozenset[int]:
        out: set[int] = set()
        for c in colors:
            out.update(self.color_index.get(str(c), ()))
        return frozenset(out)

    def reversed(self) -> "ColoredGraph":
        """Same edge ids with every arc reversed; undirected graphs return themselves."""
        if not self.directed:
            return self
        return ColoredGraph(
            self.n, ((e.head, e.tail, e.weight, e.color) for e in self.edges), directed=True
        )

    def view(self, dead: Iterable[int] = ()) -> "GraphView":
        return GraphView(self, frozenset(dead))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"ColoredGraph(n={self.n}, m={self.m}, {kind}, delta={self.delta})"


def _color_sort_key(c: str):
    # natural order for generated names like c2 < c10
    digits = c.lstrip("c")
    return (0, int(digits), c) if digits.isdigit() and c.startswith("c") else (1, 0, c)


class FaultMode(Enum):
    COLOR = "color"
    EDGE = "edge"


@dataclass(frozen=True)
class FaultSet:
    mode: FaultMode
    members: frozenset = field(default_factory=frozenset)
    budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if self.budget is not None and len(self.members) > self.budget:
            raise ValueError(f"fault set of size {len(self.members)} exceeds budget {self.budget}")

    @classmethod
    def colors(cls, *colors: Hashable, budget: Optional[int] = None) -> "FaultSet":
        return cls(FaultMode.COLOR, frozenset(str(c) for c in colors), budget)

    @classmethod
    def edges(cls, *edge_ids: int, budget: Optional[int] = None) -> "FaultSet":
        return cls(FaultMode.EDGE, frozenset(edge_ids), budget)

    def dead_edges(self, g: ColoredGraph) -> frozenset[int]:
        if self.mode is FaultMode.COLOR:
            return g.edges_of_colors(self.members)
        bad = [e for e in self.members if not 0 <= e < g.m]
        if bad:
            raise ValueError(f"edge ids {bad} not in graph")
        return frozenset(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def label(self) -> str:
        return ",".join(sorted(str(x) for x in self.members)) or "-"


FaultLike = Union[FaultSet, Iterable[int], None]


def dead_edges(g: ColoredGraph, faults: FaultLike) -> frozenset[int]:
    """Resolve a FaultSet (or a raw collection of edge ids) to failed edge ids."""
    if faults is None:
        return frozenset()
    if isinstance(faults, FaultSet):
        return faults.dead_edges(g)
    return frozenset(faults)


@dataclass(frozen=True)
class GraphView:
    """Live-edge view: the parent graph minus ``dead``. Never mutates the parent."""

    graph: ColoredGraph
    dead: frozenset

    def live_edges(self) -> list[int]:
        return [e.id for e in self.graph.edges if e.id not in self.dead]

    def minus(self, edge_ids: Iterable[int]) -> "GraphView":
        return GraphView(self.graph, self.dead | frozenset(edge_ids))

    def __len__(self) -> int:
        return self.graph.m - len(self.dead)


def apply_fault(g: ColoredGraph, faults: FaultLike) -> GraphView:
    return GraphView(g, dead_edges(g, faults))


@dataclass(frozen=True)
class Subgraph:
    parent: ColoredGraph
    edge_ids: frozenset

    def __post_init__(self):
        ids = frozenset(self.edge_ids)
        object.__setattr__(self, "edge_ids", ids)
        if any(not 0 <= e < self.parent.m for e in ids):
            raise ValueError("subgraph edge ids must belong to the parent graph")

    def view(self, faults: FaultLike = None) -> GraphView:
        absent = frozenset(range(self.parent.m)) - self.edge_ids
        return GraphView(self.parent, absent | dead_edges(self.parent, faults))

    def __len__(self) -> int:
        return len(self.edge_ids)

    def __or__(self, other: "Subgraph") -> "Subgraph":
        if other.parent is not self.parent:
            raise ValueError("cannot union subgraphs of different parents")
        return Subgraph(self.parent, self.edge_ids | other.edge_ids)

    def __contains__(self, edge_id: int) -> bool:
        return edge_id in self.edge_ids


# ---------------------------------------------------------------- cftg format

def _parse_weight(tok: str) -> Fraction:
    if "/" in tok:
        p, q = tok.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(int(tok))


def parse_graph(text: Union[str, TextIO, Iterable[str]]) -> ColoredGraph:
    """Parse the line-based cftg format; errors carry the offending line number."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    header: dict[str, int] = {}
    edges = []
    seen_magic = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not seen_magic:
            if tok != ["cftg", "1"]:
                raise GraphFormatError("expected header 'cftg 1'", lineno)
            seen_magic = True
            continue
        key = tok[0]
        if key in ("n", "directed", "weighted"):
            if len(tok) != 2:
                raise GraphFormatError(f"malformed '{key}' line", lineno)
            try:
                header[key] = int(tok[1])
            except ValueError:
                raise GraphFormatError(f"non-integer value for '{key}'", lineno) from None
            if key != "n" and header[key] not in (0, 1):
                raise GraphFormatError(f"'{key}' must be 0 or 1", lineno)
        elif key == "e":
            if "n" not in header:
                raise GraphFormatError("edge before 'n' line", lineno)
            if len(tok) != 5:
                raise GraphFormatError("edge line needs 'e <tail> <head> <weight> <color|->'", lineno)
            try:
                tail, head, weight = int(tok[1]), int(tok[2]), _parse_weight(tok[3])
            except (ValueError, ZeroDivisionError):
                raise GraphFormatError("malformed edge fields", lineno) from None
            n = header["n"]
            if not (0 <= tail < n and 0 <= head < n):
                raise GraphFormatError(f"endpoint out of range [0, {n})", lineno)
            if weight <= 0:
                raise GraphFormatError("weight must be strictly positive", lineno)
            if header.get("weighted", 1) == 0 and weight != 1:
                raise GraphFormatError("non-unit weight in an unweighted graph", lineno)
            edges.append((tail, head, weight, None if tok[4] == "-" else tok[4]))
        else:
            raise GraphFormatError(f"unknown record '{key}'", lineno)
    if not seen_magic:
        raise GraphFormatError("empty input; expected header 'cftg 1'")
    for key in ("n", "directed", "weighted"):
        if key not in header:
            raise GraphFormatError(f"missing '{key}' line")
    return ColoredGraph(header["n"], edges, directed=bool(header["directed"]))


def _format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def format_graph(g: ColoredGraph) -> str:
    out = ["cftg 1", f"n {g.n}", f"directed {int(g.directed)}", f"weighted {int(not g.unweighted)}"]
    for e in g.edges:
        out.append(f"e {e.tail} {e.head} {_format_weight(e.weight)} {e.color if e.color is not None else '-'}")
    return "\n".join(out) + "\n"


def graph_digest(g: ColoredGraph) -> str:
    return hashlib.sha256(format_graph(g).encode("utf-8")).hexdigest()


def format_subgraph(h: Subgraph) -> str:
    lines = [f"cfth 1 parent={graph_digest(h.parent)}"]
    lines.extend(str(e) for e in sorted(h.edge_ids))
    return "\n".join(lines) + "\n"


def parse_subgraph(text: str, parent: ColoredGraph) -> Subgraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("cfth 1"):
        raise GraphFormatError("expected header 'cfth 1 parent=<sha-256>'", 1)
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:] if "=" in tok)
    digest = fields.get("parent")
    if digest is not None and digest != graph_digest(parent):
        raise GraphFormatError("subgraph was built for a different parent graph", 1)
    ids = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            ids.append(int(ln))
        except ValueError:
            raise GraphFormatError("expected an edge id", lineno) from None
    return Subgraph(parent, frozenset(ids))


def edges_between(g: ColoredGraph, pairs: Sequence[tuple[int, int]]) -> Iterator[int]:
    """Edge ids joining the given vertex pairs (respecting direction)."""
    want = set(pairs)
    for e in g.edges:
        if (e.tail, e.head) in want or (not g.directed and (e.head, e.tail) in want):
            yield e.id
