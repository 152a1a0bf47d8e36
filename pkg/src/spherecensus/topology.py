"""Triangulation, integral homology and bistellar reduction of 3-manifolds."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .lattice import FaceLattice


@dataclass(frozen=True)
class SimplicialComplex:
    facets: frozenset[tuple[int, ...]]

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        return cls(frozenset(tuple(sorted(f)) for f in facets))

    @property
    def vertices(self) -> list[int]:
        return sorted({v for f in self.facets for v in f})

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def faces(self, d: int) -> list[tuple[int, ...]]:
        out = set()
        for f in self.facets:
            if len(f) > d:
                out.update(combinations(f, d + 1))
        return sorted(out)

    def f_vector(self) -> list[int]:
        return [len(self.faces(d)) for d in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.f_vector()))

    def is_closed_pseudomanifold(self) -> bool:
        if any(len(f) != 4 for f in self.facets):
            return False
        count: dict[tuple[int, ...], int] = defaultdict(int)
        for f in self.facets:
            for tri in combinations(f, 3):
                count[tri] += 1
        return all(c == 2 for c in count.values())


@dataclass(frozen=True)
class BettiVector:
    betti: tuple[int, int, int, int]
    torsion: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @property
    def has_torsion(self) -> bool:
        return any(self.torsion)

    def is_sphere_like(self) -> bool:
        return self.betti == (1, 0, 0, 1) and not self.has_torsion

    def __str__(self) -> str:
        text = "(" + ",".join(map(str, self.betti)) + ")"
        if self.has_torsion:
            text += " torsion " + repr(self.torsion)
        return text


def triangulate(L: FaceLattice) -> SimplicialComplex:
    """Order complex of the proper part of ``L`` (its barycentric subdivision)."""
    inner = set(range(1, len(L) - 1))
    chains = []

    def extend(chain: list[int]) -> None:
        ups = [y for y in L.upper_covers[chain[-1]] if y in inner]
        if not ups:
            chains.append(tuple(chain))
            return
        for y in ups:
            extend(chain + [y])

    for x in sorted(L.upper_covers[0]):
        extend([x])
    return SimplicialComplex.from_facets(chains)


# -- homology -------------------------------------------------------------


def boundary_columns(K: SimplicialComplex, d: int):
    """Sparse boundary map from d-faces to (d-1)-faces as a list of columns."""
    rows = {s: i for i, s in enumerate(K.faces(d - 1))}
    cols = []
    for s in K.faces(d):
        col = {}
        for i in range(len(s)):
            col[rows[s[:i] + s[i + 1 :]]] = (-1) ** i
        cols.append(col)
    return cols, len(rows)


def _dense_invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of a small dense integer matrix."""
    a = [r[:] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for r in a:
            r[t], r[pj] = r[pj], r[t]
        while True:
            changed = False
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        changed = True
                        break
            if changed:
                continue
            p = a[t][t]
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        changed = True
                        break
            if changed:
                continue
            # pivot must divide the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        out.append(abs(a[t][t]))
        t += 1
    return out


def invariant_factors(cols: list[dict[int, int]], n_rows: int) -> list[int]:
    """Nonzero invariant factors (Smith normal form diagonal) of a sparse matrix.

    Unit pivots are eliminated sparsely; whatever is left without a unit entry
    goes through a dense Smith reduction.
    """
    cols = [dict(c) for c in cols]
    row_index: dict[int, set[int]] = defaultdict(set)
    for j, c in enumerate(cols):
        for i in c:
            row_index[i].add(j)
    alive = set(j for j, c in enumerate(cols) if c)
    factors = []
    while True:
        pivot = None
        best = None
        for j in alive:
            c = cols[j]
            for i, v in c.items():
                if v in (1, -1):
                    cost = (len(c) - 1) * (len(row_index[i]) - 1)
                    if best is None or cost < best:
                        best, pivot = cost, (i, j)
                        if cost == 0:
                            break
            if best == 0:
                break
        if pivot is None:
            break
        i, j = pivot
        pv = cols[j][i]
        for k in list(row_index[i]):
            if k == j:
                continue
            coef = cols[k][i] * pv
            for r, v in cols[j].items():
                nv = cols[k].get(r, 0) - coef * v
                if nv:
                    if r not in cols[k]:
                        row_index[r].add(k)
                    cols[k][r] = nv
                elif r in cols[k]:
                    del cols[k][r]
                    row_index[r].discard(k)
            if not cols[k]:
                alive.discard(k)
        for r in cols[j]:
            row_index[r].discard(j)
        cols[j] = {}
        alive.discard(j)
        del row_index[i]
        factors.append(1)
    rest = [j for j in alive if cols[j]]
    if rest:
        rows = sorted({i for j in rest for i in cols[j]})
        dense = [[cols[j].get(i, 0) for j in rest] for i in rows]
        factors.extend(_dense_invariant_factors(dense))
    return factors


def rank_mod_p(cols: list[dict[int, int]], p: int = 2_147_483_647) -> int:
    """Rank over the prime field F_p."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for c in cols:
        v = {i: x % p for i, x in c.items() if x % p}
        while v:
            lead = max(v)
            if lead not in pivots:
                inv = pow(v[lead], p - 2, p)
                pivots[lead] = {i: x * inv % p for i, x in v.items()}
                rank += 1
                break
            piv = pivots[lead]
            coef = v[lead]
            for i, x in piv.items():
                nv = (v.get(i, 0) - coef * x) % p
                if nv:
                    v[i] = nv
                else:
                    v.pop(i, None)
    return rank


def betti_numbers(K: SimplicialComplex) -> BettiVector:
    """Integral Betti numbers b0..b3 and torsion coefficients."""
    counts = [len(K.faces(d)) for d in range(4)]
    ranks = [0] * 5
    torsion: list[tuple[int, ...]] = [()] * 4
    for d in range(1, 4):
        if counts[d] == 0:
            continue
        cols, _ = boundary_columns(K, d)
        facs = invariant_factors(cols, counts[d - 1])
        ranks[d] = len(facs)
        torsion[d - 1] = tuple(sorted(x for x in facs if x > 1))
    betti = tuple(counts[d] - ranks[d] - ranks[d + 1] for d in range(4))
    return BettiVector(betti, tuple(torsion))


def betti_numbers_mod_p(K: SimplicialComplex, p: int = 2_147_483_647) -> tuple[int, ...]:
    counts = [len(K.faces(d)) for d in range(4)]
    ranks = [0] * 5
    for d in range(1, 4):
        if counts[d]:
            ranks[d] = rank_mod_p(boundary_columns(K, d)[0], p)
    return tuple(counts[d] - ranks[d] - ranks[d + 1] for d in range(4))


# -- bistellar flips ------------------------------------------------------


@dataclass
class FlipResult:
    success: bool
    flips: list[dict] = field(default_factory=list)
    final: SimplicialComplex | None = None

    @property
    def outcome(self) -> str:
        return "reduced-to-simplex-boundary" if self.success else "undecided"


class _Triangulation:
    """Mutable closed 3-dimensional triangulation with incidence indices."""

    def __init__(self, tets: Iterable[Iterable[int]]):
        self.tets: set[frozenset[int]] = set()
        self.by_vertex: dict[int, set[frozenset[int]]] = defaultdict(set)
        self.by_edge: dict[frozenset[int], set[frozenset[int]]] = defaultdict(set)
        self.by_tri: dict[frozenset[int], set[frozenset[int]]] = defaultdict(set)
        for t in tets:
            self.add(frozenset(t))

    def add(self, t: frozenset[int]) -> None:
        self.tets.add(t)
        for v in t:
            self.by_vertex[v].add(t)
        for e in combinations(t, 2):
            self.by_edge[frozenset(e)].add(t)
        for tri in combinations(t, 3):
            self.by_tri[frozenset(tri)].add(t)

    def remove(self, t: frozenset[int]) -> None:
        self.tets.remove(t)
        for v in t:
            self._drop(self.by_vertex, v, t)
        for e in combinations(t, 2):
            self._drop(self.by_edge, frozenset(e), t)
        for tri in combinations(t, 3):
            self._drop(self.by_tri, frozenset(tri), t)

    @staticmethod
    def _drop(index, key, t):
        s = index[key]
        s.discard(t)
        if not s:
            del index[key]

    def has_face(self, s: frozenset[int]) -> bool:
        k = len(s)
        if k == 1:
            return next(iter(s)) in self.by_vertex
        if k == 2:
            return s in self.by_edge
        if k == 3:
            return s in self.by_tri
        return s in self.tets

    def move(self, removed: frozenset[int], added: frozenset[int]) -> bool:
        """Bistellar flip: replace star(removed) = removed * boundary(added)
        by boundary(removed) * added.  Returns False if not applicable."""
        if removed & added or len(removed) + len(added) != 5:
            return False
        if len(added) == 1:
            if next(iter(added)) in self.by_vertex:
                return False
        elif self.has_face(added):
            return False
        old = {removed | (added - {v}) for v in added}
        if self._star(removed) != old:
            return False
        for t in old:
            self.remove(t)
        for v in removed:
            self.add(added | (removed - {v}))
        return True

    def _star(self, s: frozenset[int]) -> set[frozenset[int]]:
        k = len(s)
        if k == 1:
            return set(self.by_vertex.get(next(iter(s)), ()))
        if k == 2:
            return set(self.by_edge.get(s, ()))
        if k == 3:
            return set(self.by_tri.get(s, ()))
        return {s} if s in self.tets else set()

    def n_vertices(self) -> int:
        return len(self.by_vertex)


def _is_simplex_boundary(tets) -> bool:
    verts = set().union(*tets) if tets else set()
    return len(verts) == 5 and len(tets) == 5


def bistellar_reduce(
    K: SimplicialComplex, budget: int = 100_000, seed: int = 0
) -> FlipResult:
    """Search for bistellar flips taking ``K`` to the boundary of the 4-simplex.

    Greedy: remove degree-4 vertices (4-1 moves), then collapse degree-3 edges
    (3-2 moves); when neither applies, perform random 2-3 moves, a number that
    grows with the time spent stuck, in the spirit of simulated annealing.
    The returned flip log replays with :func:`replay_flips`.
    """
    rng = random.Random(seed)
    tri = _Triangulation(K.facets)
    flips: list[dict] = []
    stuck = 0

    def record(removed, added):
        flips.append({"remove": sorted(removed), "add": sorted(added)})

    while len(flips) < budget:
        if _is_simplex_boundary(tri.tets):
            final = SimplicialComplex.from_facets(tri.tets)
            return FlipResult(True, flips, final)
        done = False
        for v in sorted(tri.by_vertex, key=lambda v: len(tri.by_vertex[v])):
            if len(tri.by_vertex[v]) != 4:
                break
            link = frozenset().union(*tri.by_vertex[v]) - {v}
            if len(link) == 4 and tri.move(frozenset({v}), link):
                record({v}, link)
                done = True
                break
        if done:
            stuck = 0
            continue
        edges3 = [e for e, ts in tri.by_edge.items() if len(ts) == 3]
        rng.shuffle(edges3)
        for e in edges3:
            link = frozenset().union(*tri.by_edge[e]) - e
            if len(link) == 3 and tri.move(e, link):
                record(e, link)
                done = True
                break
        if done:
            stuck = 0
            continue
        stuck += 1
        n_random = 1 + min(stuck, 10) // 2
        tris = sorted(tri.by_tri, key=sorted)
        rng.shuffle(tris)
        made = 0
        for t in tris:
            if made >= n_random or len(flips) >= budget:
                break
            ts = tri.by_tri.get(t)
            if not ts or len(ts) != 2:
                continue
            opp = frozenset().union(*ts) - t
            if len(opp) == 2 and tri.move(t, opp):
                record(t, opp)
                made += 1
        if made == 0:
            break
    if _is_simplex_boundary(tri.tets):
        return FlipResult(True, flips, SimplicialComplex.from_facets(tri.tets))
    return FlipResult(False, flips, SimplicialComplex.from_facets(tri.tets))


def replay_flips(K: SimplicialComplex, flips: list[dict]) -> SimplicialComplex:
    """Apply a flip log, checking every move; raises ValueError on a bad flip."""
    tri = _Triangulation(K.facets)
    for i, flip in enumerate(flips):
        if not tri.move(frozenset(flip["remove"]), frozenset(flip["add"])):
            raise ValueError(f"flip {i} is not applicable: {flip}")
    return SimplicialComplex.from_facets(tri.tets)
