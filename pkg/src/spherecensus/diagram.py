"""Exact verification of a diagram: a subdivision of one facet into the remaining facets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import Point, Polytope3, parse_points, side_of_plane
from .lattice import FaceLattice


class DegenerateCell(ValueError):
    """Raised when the vertices of some cell are coplanar."""


@dataclass
class DiagramReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    base_volume: Fraction = Fraction(0)
    cell_volume: Fraction = Fraction(0)

    def __bool__(self) -> bool:
        return self.ok


def _facet_structure(L: FaceLattice, x: int) -> dict[frozenset[int], frozenset[frozenset[int]]]:
    """Ridge vertex set -> set of its edges, for the ridges below facet element x."""
    out = {}
    for r in L.lower_covers[x]:
        out[L.sets[r]] = frozenset(L.sets[e] for e in L.lower_covers[r])
    return out


def _match_cell(L: FaceLattice, x: int, coords: Sequence[Point]) -> tuple[Polytope3 | None, str | None]:
    verts = sorted(L.sets[x])
    cell = Polytope3([coords[v] for v in verts])
    if not cell.full_dimensional:
        raise DegenerateCell(f"cell {verts} is not full-dimensional")
    want = _facet_structure(L, x)
    got = {}
    for face in cell.faces:
        edges = cell.face_edges(face)
        if edges is None:
            return cell, f"cell {verts}: face {sorted(verts[i] for i in face)} is not strictly convex"
        got[frozenset(verts[i] for i in face)] = frozenset(
            frozenset(verts[i] for i in e) for e in edges
        )
    if got != want:
        return cell, f"cell {verts}: hull faces do not match the facet's ridges"
    return cell, None


def check_diagram(L: FaceLattice, base_facet: int, coords: Sequence[Sequence]) -> DiagramReport:
    """Check conditions D1-D4; ``base_facet`` indexes ``L.facet_list()``."""
    pts = parse_points(coords)
    if len(pts) != L.n_vertices or any(len(p) != 3 for p in pts):
        raise ValueError("need one 3-dimensional point per vertex")
    facets = L.by_rank(3)
    base = facets[base_facet]
    rep = DiagramReport(ok=True)

    cells: dict[int, Polytope3] = {}
    for x in facets:
        cell, err = _match_cell(L, x, pts)
        cells[x] = cell
        if err:
            rep.failures.append(("base " if x == base else "") + err)

    # D2: containment in the base cell
    outer = cells[base]
    for v, p in enumerate(pts):
        if not outer.contains(p):
            rep.failures.append(f"vertex {v} lies outside the base cell")

    # D3: interior ridges separate their two cells
    base_ridges = L.lower_covers[base]
    for r in L.by_rank(2):
        if r in base_ridges:
            continue
        owners = [y for y in L.upper_covers[r] if y != base]
        if len(owners) != 2:
            rep.failures.append(f"ridge {sorted(L.sets[r])} is in {len(owners)} cells")
            continue
        rverts = sorted(L.sets[r])
        plane = None
        for x in owners:
            cell = cells[x]
            local = sorted(L.sets[x])
            key = frozenset(local.index(v) for v in rverts)
            if key in cell.planes:
                plane = cell.planes[key]
                break
        if plane is None:
            rep.failures.append(f"ridge {rverts} is not a face of its cells")
            continue
        sides = []
        for x in owners:
            s = {side_of_plane(*plane, pts[v]) for v in L.sets[x]} - {0}
            sides.append(s)
        if not (len(sides[0]) == 1 and len(sides[1]) == 1 and sides[0] != sides[1]):
            rep.failures.append(f"cells at ridge {rverts} are not on opposite sides")

    # D4: volumes
    rep.base_volume = outer.volume()
    rep.cell_volume = sum((cells[x].volume() for x in facets if x != base), Fraction(0))
    if rep.base_volume != rep.cell_volume:
        rep.failures.append(f"cell volumes sum to {rep.cell_volume}, base has {rep.base_volume}")

    rep.ok = not rep.failures
    return rep


def verify_diagram(L: FaceLattice, base_facet: int, coords: Sequence[Sequence]) -> bool:
    return check_diagram(L, base_facet, coords).ok
