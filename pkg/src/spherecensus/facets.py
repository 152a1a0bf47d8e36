"""Potential facets (induced planar 3-connected subgraphs) and their 2-faces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .graphs import LabeledGraph, is_k_connected


class EmbeddingError(ValueError):
    pass


def normalize_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Representative of a cyclic sequence up to rotation and reflection."""
    k = len(cycle)
    i = min(range(k), key=lambda j: cycle[j])
    rot = tuple(cycle[i:]) + tuple(cycle[:i])
    if k > 2 and rot[-1] < rot[1]:
        rot = (rot[0],) + tuple(reversed(rot[1:]))
    return rot


def cycle_edges(cycle: Sequence[int]) -> list[tuple[int, int]]:
    k = len(cycle)
    return [
        (min(cycle[i], cycle[(i + 1) % k]), max(cycle[i], cycle[(i + 1) % k])) for i in range(k)
    ]


def _nx(g: LabeledGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def is_planar(g: LabeledGraph) -> bool:
    return nx.check_planarity(_nx(g))[0]


def embedding_faces(g: LabeledGraph) -> list[tuple[int, ...]]:
    """Face cycles of the planar embedding of a 3-connected planar graph.

    By Whitney's theorem the embedding is unique up to reflection, so the
    normalized cycles do not depend on the embedding the planarity test picks.
    """
    if not is_k_connected(g, 3):
        raise EmbeddingError("graph is not 3-connected")
    planar, emb = nx.check_planarity(_nx(g))
    if not planar:
        raise EmbeddingError("graph is not planar")
    seen: set[tuple[int, int]] = set()
    faces = []
    for u, v in emb.edges():
        if (u, v) in seen:
            continue
        face = emb.traverse_face(u, v, mark_half_edges=seen)
        faces.append(normalize_cycle(face))
    if g.n - g.m + len(faces) != 2:
        raise EmbeddingError("face count violates Euler's relation")
    return sorted(faces)


@dataclass(frozen=True)
class FacetCandidate:
    vertices: tuple[int, ...]
    faces: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]]

    @property
    def f_vector(self) -> tuple[int, int, int]:
        return (len(self.vertices), len(self.edges), len(self.faces))


@dataclass
class RidgeCandidate:
    cycle: tuple[int, ...]
    facets: list[int] = field(default_factory=list)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.cycle))


def facet_candidate(g: LabeledGraph, vertices: Sequence[int]) -> FacetCandidate | None:
    """The candidate on ``vertices`` or None if the induced graph does not qualify."""
    vs = tuple(sorted(vertices))
    k = len(vs)
    if k < 4:
        return None
    sub = g.induced(vs)
    if sub.m > 3 * k - 6:
        return None
    if not is_k_connected(sub, 3):
        return None
    try:
        faces = embedding_faces(sub)
    except EmbeddingError:
        return None
    back = [tuple(vs[i] for i in face) for face in faces]
    edges = frozenset((vs[a], vs[b]) for a, b in sub.edges)
    return FacetCandidate(vs, tuple(sorted(normalize_cycle(c) for c in back)), edges)


def enumerate_facet_candidates(g: LabeledGraph) -> list[FacetCandidate]:
    """All vertex subsets inducing a planar 3-connected subgraph, with faces.

    Subsets are grown vertex by vertex; a branch dies as soon as some chosen
    vertex has fewer than three neighbours among chosen and undecided vertices.
    """
    n = g.n
    adj = g.adj_mask
    out: list[FacetCandidate] = []

    def feasible(chosen: int, pool: int) -> bool:
        c = chosen
        while c:
            low = c & -c
            c ^= low
            if bin(adj[low.bit_length() - 1] & pool).count("1") < 3:
                return False
        return True

    def grow(i: int, chosen: int, pool: int) -> None:
        # pool = chosen | undecided
        if not feasible(chosen, pool):
            return
        if i == n:
            if bin(chosen).count("1") >= 4:
                cand = facet_candidate(g, [v for v in range(n) if chosen >> v & 1])
                if cand is not None:
                    out.append(cand)
            return
        grow(i + 1, chosen | (1 << i), pool)
        grow(i + 1, chosen, pool & ~(1 << i))

    grow(0, 0, (1 << n) - 1)
    out.sort(key=lambda c: (len(c.vertices), c.vertices))
    return out


def collect_ridges(facets: Sequence[FacetCandidate]) -> list[RidgeCandidate]:
    """Union of all facet faces, identified by boundary cycle."""
    by_cycle: dict[tuple[int, ...], RidgeCandidate] = {}
    for i, facet in enumerate(facets):
        for cycle in facet.faces:
            ridge = by_cycle.setdefault(cycle, RidgeCandidate(cycle))
            ridge.facets.append(i)
    return [by_cycle[c] for c in sorted(by_cycle, key=lambda c: (len(c), c))]
