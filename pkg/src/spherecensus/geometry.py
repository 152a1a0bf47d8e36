"""Exact rational geometry: determinants, small convex hulls, volumes."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

Point = tuple[Fraction, ...]


def parse_rational(x) -> Fraction:
    """Accept ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, float):
        raise TypeError("floating point coordinates are not exact")
    return Fraction(x)


def parse_points(rows: Sequence[Sequence]) -> list[Point]:
    return [tuple(parse_rational(c) for c in row) for row in rows]


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    """Fraction-exact determinant by Gaussian elimination."""
    a = [list(map(Fraction, row)) for row in m]
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        piv = a[c][c]
        result *= piv
        for r in range(c + 1, n):
            if a[r][c]:
                k = a[r][c] / piv
                a[r] = [x - k * y for x, y in zip(a[r], a[c])]
    return sign * result


def orientation(points: Sequence[Point]) -> int:
    """Sign of the homogeneous determinant of d+1 points in R^d."""
    d = det([(1, *p) for p in points])
    return (d > 0) - (d < 0)


def _sub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _dot(a: Point, b: Point) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _cross(a: Point, b: Point) -> Point:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def hyperplane(points: Sequence[Point]) -> tuple[Point, Fraction] | None:
    """Normal vector and offset of the hyperplane through d affinely independent points in R^d.

    Returns None when the points are affinely dependent.
    """
    d = len(points[0])
    base = points[0]
    rows = [_sub(p, base) for p in points[1:]]
    normal = []
    for i in range(d):
        minor = [[r[j] for j in range(d) if j != i] for r in rows]
        normal.append((-1) ** i * det(minor) if minor else Fraction(1))
    normal = tuple(normal)
    if all(c == 0 for c in normal):
        return None
    return normal, _dot(normal, base)


def hull_facets(points: Sequence[Point]) -> list[frozenset[int]]:
    """Facets of conv(points), as sets of point indices lying on each supporting hyperplane.

    Brute force over d-subsets; fine for the few dozen points used here. Returns an
    empty list if the points are not full-dimensional.
    """
    d = len(points[0])
    found: set[frozenset[int]] = set()
    for idx in combinations(range(len(points)), d):
        h = hyperplane([points[i] for i in idx])
        if h is None:
            continue
        normal, off = h
        side = [_dot(normal, p) - off for p in points]
        if all(s >= 0 for s in side) or all(s <= 0 for s in side):
            on = frozenset(i for i, s in enumerate(side) if s == 0)
            if len(on) < len(points):
                found.add(on)
    return sorted(found, key=sorted)


def polygon_edges(points: Sequence[Point], normal: Point) -> set[frozenset[int]] | None:
    """Boundary edges of a planar convex polygon in R^3, or None if not in strictly convex position."""
    n = len(points)
    edges = set()
    for i, j in combinations(range(n), 2):
        # the in-plane normal of segment ij
        dirv = _cross(normal, _sub(points[j], points[i]))
        side = [_dot(dirv, _sub(points[k], points[i])) for k in range(n) if k not in (i, j)]
        if all(s > 0 for s in side) or all(s < 0 for s in side):
            edges.add(frozenset((i, j)))
    degree = [0] * n
    for e in edges:
        for v in e:
            degree[v] += 1
    if any(x != 2 for x in degree) or len(edges) != n:
        return None
    return edges


class Polytope3:
    """Exact convex hull of a finite point set in R^3 with polygon faces."""

    def __init__(self, points: Sequence[Point]):
        self.points = list(points)
        self.faces: list[frozenset[int]] = hull_facets(self.points) if len(self.points) >= 4 else []
        self.full_dimensional = bool(self.faces)
        self.planes: dict[frozenset[int], tuple[Point, Fraction]] = {}
        for f in self.faces:
            idx = sorted(f)
            for tri in combinations(idx, 3):
                h = hyperplane([self.points[i] for i in tri])
                if h is not None:
                    self.planes[f] = h
                    break

    def face_edges(self, face: frozenset[int]) -> set[frozenset[int]] | None:
        idx = sorted(face)
        local = polygon_edges([self.points[i] for i in idx], self.planes[face][0])
        if local is None:
            return None
        return {frozenset(idx[k] for k in e) for e in local}

    def centroid(self) -> Point:
        n = len(self.points)
        return tuple(sum(c) / n for c in zip(*self.points))

    def contains(self, p: Point) -> bool:
        """Weak containment."""
        c = self.centroid()
        for face, (normal, off) in self.planes.items():
            inner = _dot(normal, c) - off
            s = _dot(normal, p) - off
            if s != 0 and (s > 0) != (inner > 0):
                return False
        return True

    def volume(self) -> Fraction:
        """Cone decomposition from the centroid, fan-triangulating each face polygon."""
        c = self.centroid()
        total = Fraction(0)
        for face in self.faces:
            edges = self.face_edges(face)
            if edges is None:
                raise ValueError("face is not a convex polygon")
            cycle = _cycle_from_edges(edges)
            a = self.points[cycle[0]]
            for i in range(1, len(cycle) - 1):
                b, d = self.points[cycle[i]], self.points[cycle[i + 1]]
                total += abs(det([_sub(a, c), _sub(b, c), _sub(d, c)]))
        return total / 6


def _cycle_from_edges(edges: set[frozenset[int]]) -> list[int]:
    adj: dict[int, list[int]] = {}
    for e in edges:
        u, v = tuple(e)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = min(adj)
    cycle, prev, cur = [start], None, start
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == start:
            return cycle
        cycle.append(nxt)
        prev, cur = cur, nxt


def side_of_plane(normal: Point, off: Fraction, p: Point) -> int:
    s = _dot(normal, p) - off
    return (s > 0) - (s < 0)
