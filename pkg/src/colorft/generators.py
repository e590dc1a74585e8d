"""Seeded random edge-colored instances for tests and benchmarks."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .graph import ColoredGraph


def color_edges(m: int, delta: int, rng: random.Random, uncolored: float = 0.0) -> list[Optional[str]]:
    """Random coloring with every class of size at most ``delta``.

    Edges are shuffled and cut into consecutive chunks of random size in
    [1, delta]; a fraction ``uncolored`` of edges gets no color.
    """
    colors: list[Optional[str]] = [None] * m
    if delta <= 0:
        return colors
    order = [i for i in range(m) if rng.random() >= uncolored]
    rng.shuffle(order)
    pos, next_color = 0, 0
    while pos < len(order):
        size = rng.randint(1, delta)
        for i in order[pos:pos + size]:
            colors[i] = f"c{next_color}"
        next_color += 1
        pos += size
    return colors


def _edge_pairs(n: int, family: str, rng: random.Random, directed: bool, degree: float) -> list[tuple[int, int]]:
    pairs: set[tuple[int, int]] = set()
    if family == "gnp":
        p = min(1.0, degree / max(n - 1, 1))
        for u in range(n):
            for v in range(n) if directed else range(u + 1, n):
                if u != v and rng.random() < p:
                    pairs.add((u, v))
        # a random spanning path keeps most vertices reachable
        perm = list(range(n))
        rng.shuffle(perm)
        for a, b in zip(perm, perm[1:]):
            if (a, b) not in pairs and (directed or (b, a) not in pairs):
                pairs.add((a, b) if directed or a < b else (b, a))
    elif family == "ring":
        # a long cycle plus sparse chords: long shortest paths that exercise suffix hitting
        for u in range(n):
            v = (u + 1) % n
            pairs.add((u, v) if directed or u < v else (v, u))
        chords = max(1, int(degree * n / 8))
        for _ in range(chords):
            u, v = rng.sample(range(n), 2)
            if directed or u < v:
                pairs.add((u, v))
            else:
                pairs.add((v, u))
        if directed:
            for u in range(n):
                pairs.add(((u + 1) % n, u))
    else:
        raise ValueError(f"unknown graph family {family!r}")
    return sorted(pairs)


def random_colored_graph(
    n: int,
    delta: int,
    seed: int,
    *,
    directed: bool = False,
    weighted: bool = False,
    family: str = "gnp",
    degree: float = 4.0,
    uncolored: float = 0.0,
    max_weight: int = 10,
) -> ColoredGraph:
    rng = random.Random(seed)
    pairs = _edge_pairs(n, family, rng, directed, degree)
    colors = color_edges(len(pairs), delta, rng, uncolored)
    edges = []
    for (u, v), c in zip(pairs, colors):
        w = Fraction(rng.randint(1, max_weight)) if weighted else Fraction(1)
        edges.append((u, v, w, c))
    return ColoredGraph(n, edges, directed=directed)
