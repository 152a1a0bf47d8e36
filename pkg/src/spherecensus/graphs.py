"""Isomorph-free enumeration of candidate 1-skeleta.

Graphs are generated edge by edge with canonical augmentation: a child
``H = G + e`` is kept only when ``H`` minus its canonical deletion edge is
isomorphic to ``G``.  Canonical labelings come from nauty (via pynauty).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

import pynauty


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge {(u, v)} for a graph on {self.n} vertices")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "LabeledGraph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return cls(n, frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "LabeledGraph":
        return cls(n, frozenset(combinations(range(n), 2)))

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def adj_mask(self) -> tuple[int, ...]:
        return tuple(sum(1 << w for w in nb) for nb in self.adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def complement(self) -> "LabeledGraph":
        return LabeledGraph(
            self.n, frozenset(e for e in combinations(range(self.n), 2) if e not in self.edges)
        )

    def relabel(self, perm) -> "LabeledGraph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return LabeledGraph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def induced(self, vertices: Iterable[int]) -> "LabeledGraph":
        """Induced subgraph, relabeled to 0..k-1 in increasing vertex order."""
        vs = sorted(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        return LabeledGraph(
            len(vs),
            frozenset((pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos),
        )


# -- graph6 ---------------------------------------------------------------


def to_graph6(g: LabeledGraph) -> str:
    if g.n > 62:
        raise ValueError("graph6 encoding here supports at most 62 vertices")
    bits = [1 if (i, j) in g.edges else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = "".join(
        chr(63 + int("".join(map(str, bits[k : k + 6])), 2)) for k in range(0, len(bits), 6)
    )
    return chr(63 + g.n) + body


def from_graph6(code: str) -> LabeledGraph:
    code = code.strip()
    if code.startswith(">>graph6<<"):
        code = code[len(">>graph6<<") :]
    if not code or not (63 <= ord(code[0]) <= 125):
        raise ValueError(f"not a graph6 string: {code!r}")
    n = ord(code[0]) - 63
    bits = []
    for ch in code[1:]:
        x = ord(ch) - 63
        if not 0 <= x < 64:
            raise ValueError(f"bad graph6 character {ch!r}")
        bits.extend((x >> (5 - k)) & 1 for k in range(6))
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    if len(bits) < len(pairs):
        raise ValueError("graph6 string too short")
    return LabeledGraph(n, frozenset(p for p, b in zip(pairs, bits) if b))


# -- canonical forms ------------------------------------------------------


def _nauty_graph(g: LabeledGraph, coloring=None) -> pynauty.Graph:
    adjacency = {v: sorted(g.adj[v]) for v in range(g.n) if g.adj[v]}
    return pynauty.Graph(g.n, adjacency_dict=adjacency, vertex_coloring=coloring or [])


def canonical_labeling(g: LabeledGraph, coloring=None) -> list[int]:
    """``perm`` with ``perm[v]`` the canonical position of vertex ``v``."""
    if g.n == 0:
        return []
    order = pynauty.canon_label(_nauty_graph(g, coloring))
    perm = [0] * g.n
    for pos, v in enumerate(order):
        perm[v] = pos
    return perm


def canonical_form(g: LabeledGraph) -> LabeledGraph:
    return g.relabel(canonical_labeling(g))


def canonical_code(g: LabeledGraph) -> str:
    """graph6 string of the canonical form; equal iff isomorphic."""
    return to_graph6(canonical_form(g))


# -- connectivity ---------------------------------------------------------


def _connected_without(g: LabeledGraph, removed: int) -> bool:
    full = (1 << g.n) - 1
    alive = full & ~removed
    if alive == 0:
        return True
    start = alive & -alive
    seen = start
    frontier = start
    adj = g.adj_mask
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = adj[low.bit_length() - 1] & alive & ~seen
        seen |= new
        frontier |= new
    return seen == alive


def is_connected(g: LabeledGraph) -> bool:
    return g.n > 0 and _connected_without(g, 0)


def is_k_connected(g: LabeledGraph, k: int) -> bool:
    """More than k vertices and no vertex cut of fewer than k vertices."""
    if k < 1:
        raise ValueError("k must be positive")
    if g.n <= k:
        return False
    if min(g.degree(v) for v in range(g.n)) < k:
        return False
    for s in range(k):
        for cut in combinations(range(g.n), s):
            if not _connected_without(g, sum(1 << v for v in cut)):
                return False
    return True


# -- enumeration ----------------------------------------------------------


def _augment(n: int, max_degree: int, target: int) -> Iterator[LabeledGraph]:
    """Canonical representatives of all graphs on ``n`` vertices with ``target``
    edges and maximum degree at most ``max_degree``."""

    def deletion_edge(h: LabeledGraph) -> tuple[tuple[int, int], LabeledGraph]:
        perm = canonical_labeling(h)
        canon = h.relabel(perm)
        inv = [0] * h.n
        for v, p in enumerate(perm):
            inv[p] = v
        a, b = max(canon.edges)
        u, v = inv[a], inv[b]
        return (min(u, v), max(u, v)), canon

    def extend(g: LabeledGraph, g_code: str) -> Iterator[LabeledGraph]:
        if g.m == target:
            yield g
            return
        seen: set[str] = set()
        degs = [g.degree(v) for v in range(n)]
        for e in combinations(range(n), 2):
            if e in g.edges or degs[e[0]] >= max_degree or degs[e[1]] >= max_degree:
                continue
            h = LabeledGraph(n, g.edges | {e})
            e_star, canon = deletion_edge(h)
            h_code = to_graph6(canon)
            if h_code in seen:
                continue
            parent = LabeledGraph(n, h.edges - {e_star})
            if e_star != e and canonical_code(parent) != g_code:
                continue
            seen.add(h_code)
            yield from extend(canon, h_code)

    empty = LabeledGraph(n, frozenset())
    yield from extend(empty, to_graph6(empty))


def enumerate_graphs(
    n: int, m: int, min_degree: int = 4, connectivity: int = 2
) -> Iterator[LabeledGraph]:
    """One canonical graph per isomorphism class with ``n`` vertices, ``m`` edges,
    minimum degree >= ``min_degree`` and vertex connectivity >= ``connectivity``.

    Output is sorted by canonical code.  When ``m`` exceeds half the vertex
    pairs the complements are generated instead, which lets the minimum-degree
    bound prune as a (hereditary) maximum-degree bound.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pairs = n * (n - 1) // 2
    if not 0 <= m <= pairs:
        raise ValueError(f"m must lie in [0, {pairs}]")
    if n * min_degree > 2 * m or min_degree > n - 1:
        return
    if 2 * m > pairs:
        source = (
            h.complement() for h in _augment(n, n - 1 - min_degree, pairs - m)
        )
    else:
        source = _augment(n, n - 1, m)
    found = {}
    for g in source:
        if min(g.degree(v) for v in range(n)) < min_degree:
            continue
        if connectivity > 0 and not is_k_connected(g, connectivity):
            continue
        canon = canonical_form(g)
        found[to_graph6(canon)] = canon
    for code in sorted(found):
        yield found[code]
