"""Face posets of cell decompositions of 3-manifolds and their verification.

A :class:`FaceLattice` stores the proper faces together with a bottom element
(the empty face) and a top element (the whole complex).  Elements are integer
ids; ``0`` is the bottom and ``len(L) - 1`` the top.  Every element carries a
rank and the set of vertices it contains.  Order relations are kept as
bitmasks so that interval computations stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import pynauty

from .fvector import FVector
from .graphs import LabeledGraph


class LatticeError(ValueError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True, eq=False)
class FaceLattice:
    sets: tuple[frozenset[int], ...]
    ranks: tuple[int, ...]
    lower_covers: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not (len(self.sets) == len(self.ranks) == len(self.lower_covers)):
            raise LatticeError("inconsistent element data")
        if self.lower_covers[0]:
            raise LatticeError("element 0 must be the bottom")

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.sets) - 1

    @cached_property
    def n_vertices(self) -> int:
        return len(self.sets[self.top])

    def by_rank(self, r: int) -> list[int]:
        return [x for x, rk in enumerate(self.ranks) if rk == r]

    @cached_property
    def upper_covers(self) -> tuple[frozenset[int], ...]:
        up: list[set[int]] = [set() for _ in self.sets]
        for x, lows in enumerate(self.lower_covers):
            for y in lows:
                up[y].add(x)
        return tuple(frozenset(s) for s in up)

    @cached_property
    def down(self) -> tuple[int, ...]:
        """``down[x]``: bitmask of all elements <= x."""
        memo: dict[int, int] = {}
        order = sorted(range(len(self)), key=lambda x: self.ranks[x])
        for x in order:
            mask = 1 << x
            for y in self.lower_covers[x]:
                mask |= memo[y]
            memo[x] = mask
        return tuple(memo[x] for x in range(len(self)))

    @cached_property
    def up(self) -> tuple[int, ...]:
        masks = [0] * len(self)
        for x, d in enumerate(self.down):
            for y in _bits(d):
                masks[y] |= 1 << x
        return tuple(masks)

    def leq(self, a: int, b: int) -> bool:
        return bool(self.down[b] >> a & 1)

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_ranked(
        cls,
        n_vertices: int,
        ranked: Sequence[Sequence[frozenset[int]]],
        covers: Sequence[Sequence[Iterable[int]]],
    ) -> "FaceLattice":
        """Build from explicit faces of ranks 0..3 and their lower covers.

        ``ranked[r][i]`` is the vertex set of the i-th face of rank r and
        ``covers[r][i]`` lists indices into ``ranked[r - 1]`` (ignored for r = 0).
        """
        offsets = [1]
        for faces in ranked:
            offsets.append(offsets[-1] + len(faces))
        sets: list[frozenset[int]] = [frozenset()]
        ranks = [-1]
        lows: list[frozenset[int]] = [frozenset()]
        for r, faces in enumerate(ranked):
            for i, s in enumerate(faces):
                sets.append(frozenset(s))
                ranks.append(r)
                if r == 0:
                    lows.append(frozenset({0}))
                else:
                    lows.append(frozenset(offsets[r - 1] + j for j in covers[r][i]))
        top_r = len(ranked)
        sets.append(frozenset(range(n_vertices)))
        ranks.append(top_r)
        last = ranked[-1] if ranked else []
        lows.append(frozenset(range(offsets[top_r - 1], offsets[top_r - 1] + len(last))))
        return cls(tuple(sets), tuple(ranks), tuple(lows))

    @classmethod
    def from_facets(cls, facets: Sequence[Iterable[int]], n_vertices: int | None = None) -> "FaceLattice":
        """Face poset generated by facet vertex sets under intersection.

        This is the face lattice whenever the complex has the intersection
        property, where every face is the intersection of the facets
        containing it.  Ranks are heights above the empty face, so a collection
        that is not a valid complex may come out non-graded; the predicates
        report that rather than this constructor.
        """
        fsets = [frozenset(f) for f in facets]
        if not fsets:
            raise LatticeError("empty facet list")
        verts = frozenset().union(*fsets)
        n = n_vertices if n_vertices is not None else max(verts) + 1
        if verts != frozenset(range(n)):
            raise LatticeError("facets must cover vertices 0..n-1")
        closed = set(fsets)
        frontier = set(fsets)
        while frontier:
            new = set()
            for a in frontier:
                for b in fsets:
                    c = a & b
                    if c and c not in closed:
                        new.add(c)
            closed |= new
            frontier = new
        if len(set(fsets)) != len(fsets):
            raise LatticeError("repeated facet")
        faces = sorted(closed - set(fsets), key=lambda s: (len(s), sorted(s)))
        elements = [frozenset()] + faces + fsets + [verts]
        if verts in fsets:
            raise LatticeError("a facet contains every vertex")
        index = {s: i for i, s in enumerate(elements)}
        # lower covers: maximal proper subsets among elements
        lows: list[frozenset[int]] = []
        for i, s in enumerate(elements):
            below = [t for t in elements if t < s]
            maximal = [t for t in below if not any(t < u for u in below)]
            lows.append(frozenset(index[t] for t in maximal))
        height = [0] * len(elements)
        for i in sorted(range(len(elements)), key=lambda i: len(elements[i])):
            height[i] = max((height[j] + 1 for j in lows[i]), default=0)
        ranks = tuple(h - 1 for h in height)
        return cls(tuple(elements), ranks, tuple(lows))

    def to_json(self) -> dict:
        return {
            "sets": [sorted(s) for s in self.sets],
            "ranks": list(self.ranks),
            "covers": [sorted(c) for c in self.lower_covers],
        }

    @classmethod
    def from_json(cls, d: dict) -> "FaceLattice":
        return cls(
            tuple(frozenset(s) for s in d["sets"]),
            tuple(d["ranks"]),
            tuple(frozenset(c) for c in d["covers"]),
        )

    # -- basic data ----------------------------------------------------------

    def faces(self, r: int) -> list[frozenset[int]]:
        return [self.sets[x] for x in self.by_rank(r)]

    def f_vector(self) -> FVector:
        return FVector(*(len(self.by_rank(r)) for r in range(4)))

    def flag_f03(self) -> int:
        return sum(len(s) for s in self.faces(3))

    def facet_list(self) -> list[list[int]]:
        return [sorted(s) for s in self.faces(3)]

    # -- predicates ----------------------------------------------------------

    def is_graded(self) -> bool:
        """Bounded, ranks -1..4, and every cover raises rank by exactly one."""
        if self.ranks[0] != -1 or self.ranks[self.top] != 4:
            return False
        for x, lows in enumerate(self.lower_covers):
            if x != 0 and not lows:
                return False
            if any(self.ranks[y] != self.ranks[x] - 1 for y in lows):
                return False
        if any(not ups for x, ups in enumerate(self.upper_covers) if x != self.top):
            return False
        return True

    @cached_property
    def _odd_mask(self) -> int:
        return sum(1 << x for x, r in enumerate(self.ranks) if r % 2)

    def is_eulerian(self) -> bool:
        """Every interval [a, b] with a < b has as many odd- as even-rank elements."""
        if not self.is_graded():
            return False
        odd = self._odd_mask
        for a in range(len(self)):
            ups = self.up[a]
            for b in _bits(ups & ~(1 << a)):
                interval = ups & self.down[b]
                k = _popcount(interval & odd)
                if 2 * k != _popcount(interval):
                    return False
        return True

    def is_interval_connected(self) -> bool:
        """Proper part of every interval of length >= 3 is connected."""
        if not self.is_graded():
            return False
        for a in range(len(self)):
            ups = self.up[a]
            for b in _bits(ups):
                if self.ranks[b] - self.ranks[a] < 3:
                    continue
                proper = ups & self.down[b] & ~(1 << a) & ~(1 << b)
                start = proper & -proper
                seen = start
                frontier = start
                while frontier:
                    x = (frontier & -frontier).bit_length() - 1
                    frontier &= frontier - 1
                    new = (self.up[x] | self.down[x]) & proper & ~seen
                    seen |= new
                    frontier |= new
                if seen != proper:
                    return False
        return True

    def meet(self, a: int, b: int) -> int | None:
        common = self.down[a] & self.down[b]
        maximal = [x for x in _bits(common) if self.up[x] & common == 1 << x]
        return maximal[0] if len(maximal) == 1 else None

    def is_lattice(self) -> bool:
        """Every pair has a meet (the poset is bounded, so joins follow)."""
        return all(self.meet(a, b) is not None for a, b in combinations(range(len(self)), 2))

    def has_intersection_property(self) -> bool:
        """Faces are determined by vertex sets and any two faces meet in a face
        whose vertex set is the intersection of theirs."""
        if len(set(self.sets)) != len(self.sets):
            return False
        for a, b in combinations(range(len(self)), 2):
            m = self.meet(a, b)
            if m is None or self.sets[m] != self.sets[a] & self.sets[b]:
                return False
        return True

    def is_2s2s(self) -> bool:
        """All ridges are triangles and every edge lies in exactly three facets."""
        if any(len(s) != 3 for s in self.faces(2)):
            return False
        facets = self.by_rank(3)
        facet_mask = sum(1 << x for x in facets)
        return all(_popcount(self.up[e] & facet_mask) == 3 for e in self.by_rank(1))

    # -- transformations -----------------------------------------------------

    def dual(self) -> "FaceLattice":
        """Order dual; the new vertex labels are the facet indices in rank order.

        Elements stay sorted by rank and, within a rank, by their old id, so
        dualizing twice gives back the same lattice element for element.
        """
        facets = self.by_rank(3)
        pos = {x: i for i, x in enumerate(facets)}
        top_r = self.ranks[self.top]
        order = sorted(range(len(self)), key=lambda x: (top_r - 1 - self.ranks[x], x))
        new_id = {x: i for i, x in enumerate(order)}
        sets, ranks, lows = [], [], []
        for x in order:
            sets.append(frozenset(pos[y] for y in _bits(self.up[x]) if y in pos))
            ranks.append(top_r - 1 - self.ranks[x])
            lows.append(frozenset(new_id[y] for y in self.upper_covers[x]))
        return FaceLattice(tuple(sets), tuple(ranks), tuple(lows))

    def relabel(self, perm: Sequence[int]) -> "FaceLattice":
        """Rename vertex v to perm[v]; the element ids are unchanged."""
        return FaceLattice(
            tuple(frozenset(perm[v] for v in s) for s in self.sets), self.ranks, self.lower_covers
        )

    def code(self) -> str:
        return lattice_code(self)


def lattice_code(L: FaceLattice) -> str:
    """Canonical form of the vertex-facet incidence structure.

    Under the intersection property the incidences determine the lattice, so
    equal codes mean isomorphic lattices. Otherwise the whole Hasse diagram is
    canonized, with a distinct prefix.
    """
    if not L.has_intersection_property():
        return hasse_code(L)
    n = L.n_vertices
    facets = L.faces(3)
    k = len(facets)
    adjacency = {n + i: sorted(f) for i, f in enumerate(facets)}
    coloring = [set(range(n)), set(range(n, n + k))] if k else [set(range(n))]
    g = pynauty.Graph(n + k, adjacency_dict=adjacency, vertex_coloring=coloring)
    order = pynauty.canon_label(g)
    pos = {v: i for i, v in enumerate(order)}
    canon = sorted(tuple(sorted(pos[v] for v in f)) for f in facets)
    body = ";".join(",".join(str(v) for v in f) for f in canon)
    return f"{n}/{k}/{body}"


def assemble(
    g: LabeledGraph,
    facets: Sequence,
    chosen_facets: Iterable[int],
    ridges: Sequence,
    chosen_ridges: Iterable[int],
) -> FaceLattice:
    """Face poset of a feasibility solution.

    Vertices and edges come from ``g``; an edge lies below a ridge iff it is
    on the ridge cycle, and a ridge lies below a facet iff its cycle is a face
    of the facet's embedding.
    """
    from .facets import cycle_edges

    fids = sorted(chosen_facets)
    rids = sorted(chosen_ridges)
    edges = sorted(g.edges)
    edge_pos = {e: i for i, e in enumerate(edges)}
    ridge_pos = {ridges[j].cycle: i for i, j in enumerate(rids)}
    ridge_covers = [[edge_pos[e] for e in cycle_edges(ridges[j].cycle)] for j in rids]
    covered = {e for cov in ridge_covers for e in cov}
    missing = [edges[i] for i in range(len(edges)) if i not in covered]
    if missing:
        raise LatticeError(f"edges in no chosen ridge: {missing}")
    facet_covers = []
    for i in fids:
        try:
            facet_covers.append([ridge_pos[c] for c in facets[i].faces])
        except KeyError as exc:
            raise LatticeError(f"facet {facets[i].vertices} has an unchosen ridge") from exc
    ranked = [
        [frozenset({v}) for v in range(g.n)],
        [frozenset(e) for e in edges],
        [frozenset(ridges[j].cycle) for j in rids],
        [frozenset(facets[i].vertices) for i in fids],
    ]
    covers = [
        [],
        [[u, v] for u, v in edges],
        ridge_covers,
        facet_covers,
    ]
    return FaceLattice.from_ranked(g.n, ranked, covers)


def hasse_code(L: FaceLattice) -> str:
    N = len(L)
    adjacency = {x: sorted(L.lower_covers[x]) for x in range(N)}
    ranks = sorted(set(L.ranks))
    coloring = [set(x for x in range(N) if L.ranks[x] == r) for r in ranks]
    g = pynauty.Graph(N, adjacency_dict=adjacency, vertex_coloring=coloring)
    order = pynauty.canon_label(g)
    pos = {v: i for i, v in enumerate(order)}
    edges = sorted((pos[x], pos[y]) for x in range(N) for y in L.lower_covers[x])
    rank_seq = ",".join(str(L.ranks[v]) for v in order)
    return f"H{N}/{rank_seq}/" + ";".join(f"{a},{b}" for a, b in edges)
