"""0/1 feasibility systems whose solutions are candidate face lattices.

Variables ``x_i`` select facet candidates and ``y_j`` select ridge candidates.
All solutions are enumerated by a backtracking search with bound propagation
over the linear constraints; a blocking-clause loop is available as a second,
independent enumeration strategy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .facets import FacetCandidate, RidgeCandidate, cycle_edges
from .fvector import FVector
from .graphs import LabeledGraph


class TriviallyInfeasible(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[int, int], ...]  # (variable, coefficient)
    sense: str  # "==", "<=" or ">="
    rhs: int
    name: str = ""
    # implied by the other constraints: checked on solutions, skipped while propagating
    implied: bool = False

    def holds(self, values: Sequence[int]) -> bool:
        lhs = sum(c * values[v] for v, c in self.coeffs)
        if self.sense == "==":
            return lhs == self.rhs
        if self.sense == "<=":
            return lhs <= self.rhs
        return lhs >= self.rhs


def _constraint(
    terms: dict[int, int], sense: str, rhs: int, name: str, implied: bool = False
) -> Constraint:
    return Constraint(tuple(sorted((v, c) for v, c in terms.items() if c)), sense, rhs, name, implied)


@dataclass(frozen=True)
class SolutionMask:
    facets: frozenset[int]
    ridges: frozenset[int]


@dataclass
class FeasibilityInstance:
    n_vars: int
    constraints: list[Constraint]
    n_facet_vars: int = 0
    branch_order: list[int] = field(default_factory=list)
    facets: Sequence[FacetCandidate] = ()
    ridges: Sequence[RidgeCandidate] = ()

    def is_facet_var(self, v: int) -> bool:
        return v < self.n_facet_vars

    def values(self, sol: SolutionMask) -> list[int]:
        vals = [0] * self.n_vars
        for i in sol.facets:
            vals[i] = 1
        for j in sol.ridges:
            vals[self.n_facet_vars + j] = 1
        return vals

    def mask(self, values: Sequence[int]) -> SolutionMask:
        k = self.n_facet_vars
        return SolutionMask(
            frozenset(i for i in range(k) if values[i]),
            frozenset(j - k for j in range(k, self.n_vars) if values[j]),
        )

    def check(self, sol: SolutionMask) -> bool:
        vals = self.values(sol)
        return all(c.holds(vals) for c in self.constraints)


def improper_pair(a: FacetCandidate, b: FacetCandidate, g: LabeledGraph) -> bool:
    """True if the two facets cannot both occur: their common vertices are not
    empty, a vertex, an edge, or a common 2-face with the same boundary cycle."""
    common = set(a.vertices) & set(b.vertices)
    if len(common) <= 1:
        return False
    if len(common) == 2:
        u, v = sorted(common)
        return not g.has_edge(u, v)
    shared = set(a.faces) & set(b.faces)
    return not any(set(c) == common for c in shared)


def build_instance(
    g: LabeledGraph,
    facets: Sequence[FacetCandidate],
    ridges: Sequence[RidgeCandidate],
    f: FVector | Sequence[int],
    edge_lb: int = 3,
) -> FeasibilityInstance:
    f0, f1, f2, f3 = f
    if g.n != f0 or g.m != f1:
        raise ValueError(f"graph has (n, m) = ({g.n}, {g.m}), expected ({f0}, {f1})")
    if len(facets) < f3 or len(ridges) < f2:
        raise TriviallyInfeasible(
            f"{len(facets)} facet and {len(ridges)} ridge candidates for f = {tuple(f)}"
        )
    nx_ = len(facets)
    y = lambda j: nx_ + j  # noqa: E731
    cons: list[Constraint] = []
    cons.append(_constraint({i: 1 for i in range(nx_)}, "==", f3, "facets"))
    cons.append(_constraint({y(j): 1 for j in range(len(ridges))}, "==", f2, "ridges"))
    for j, r in enumerate(ridges):
        terms = {y(j): 2}
        for i in r.facets:
            terms[i] = -1
        cons.append(_constraint(terms, "==", 0, f"ridge {r.cycle}"))
    for v in range(g.n):
        terms: dict[int, int] = {}
        for j, r in enumerate(ridges):
            if v in r.cycle:
                terms[y(j)] = -1
        for i, F in enumerate(facets):
            if v in F.vertices:
                terms[i] = 1
        cons.append(_constraint(terms, "==", 2 - g.degree(v), f"vertex {v}"))
    ridge_edges = [set(cycle_edges(r.cycle)) for r in ridges]
    for e in sorted(g.edges):
        terms = {}
        for j in range(len(ridges)):
            if e in ridge_edges[j]:
                terms[y(j)] = 1
        lower = {}
        for i, F in enumerate(facets):
            if e in F.edges:
                terms[i] = -1
                lower[i] = 1
        # each edge of a facet lies on exactly two of its 2-faces, so the ridge
        # equations already force this one
        cons.append(_constraint(terms, "==", 0, f"edge {e}", implied=True))
        cons.append(_constraint(lower, ">=", edge_lb, f"edge {e} lower"))
    for a, b in combinations(range(nx_), 2):
        if improper_pair(facets[a], facets[b], g):
            cons.append(_constraint({a: 1, b: 1}, "<=", 1, f"improper {a},{b}"))

    # branch on facets sharing many candidate ridges first
    overlap = [sum(len(ridges[j].facets) - 1 for j in _facet_ridges(F, ridges)) for F in facets]
    order = sorted(range(nx_), key=lambda i: (-overlap[i], i))
    return FeasibilityInstance(
        n_vars=nx_ + len(ridges),
        constraints=cons,
        n_facet_vars=nx_,
        branch_order=order,
        facets=facets,
        ridges=ridges,
    )


def _facet_ridges(F: FacetCandidate, ridges: Sequence[RidgeCandidate]) -> list[int]:
    cycles = set(F.faces)
    return [j for j, r in enumerate(ridges) if r.cycle in cycles]


class _Search:
    """Depth-first search with incrementally maintained activity bounds.

    For every constraint the smallest and largest achievable left-hand side
    (given the fixed variables) is kept up to date; a constraint is rescanned
    for forced variables only when its slack drops below its largest
    coefficient.  Rows of the form ``x_a + x_b <= 1`` are kept as a conflict
    graph instead, and implied rows are only checked on complete assignments.
    """

    def __init__(self, inst: FeasibilityInstance, extra: Sequence[Constraint] = (), max_nodes=None):
        self.inst = inst
        self.all_cons = list(inst.constraints) + list(extra)
        n = inst.n_vars
        self.conflicts: list[list[int]] = [[] for _ in range(n)]
        self.cons: list[Constraint] = []
        for c in self.all_cons:
            if c.implied:
                continue
            if c.sense == "<=" and c.rhs == 1 and len(c.coeffs) == 2 and all(a == 1 for _, a in c.coeffs):
                (u, _), (v, _) = c.coeffs
                self.conflicts[u].append(v)
                self.conflicts[v].append(u)
                continue
            self.cons.append(c)
        self.watch: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.lo: list[int] = []
        self.hi: list[int] = []
        self.le: list[bool] = []
        self.ge: list[bool] = []
        self.rhs: list[int] = []
        self.width: list[int] = []
        for k, c in enumerate(self.cons):
            for v, a in c.coeffs:
                self.watch[v].append((k, a))
            self.lo.append(sum(a for _, a in c.coeffs if a < 0))
            self.hi.append(sum(a for _, a in c.coeffs if a > 0))
            self.le.append(c.sense in ("==", "<="))
            self.ge.append(c.sense in ("==", ">="))
            self.rhs.append(c.rhs)
            self.width.append(max((abs(a) for _, a in c.coeffs), default=0))
        order = list(inst.branch_order) or list(range(inst.n_facet_vars))
        seen = set(order)
        self.order = order + [v for v in range(n) if v not in seen]
        k = inst.n_facet_vars
        self.ridge_rows = [(k + j, list(r.facets)) for j, r in enumerate(inst.ridges)]
        self.vals = [-1] * n
        self.trail: list[int] = []
        self.max_nodes = max_nodes
        self.nodes = 0

    def _set(self, v: int, value: int, queue: list[int]) -> bool:
        vals = self.vals
        vals[v] = value
        self.trail.append(v)
        lo, hi, le, ge, rhs, width = self.lo, self.hi, self.le, self.ge, self.rhs, self.width
        ok = True
        for k, a in self.watch[v]:
            if (a > 0) == bool(value):
                lo[k] += a if value else -a
            else:
                hi[k] += a if value else -a
            if ok:
                r = rhs[k]
                if (le[k] and lo[k] > r) or (ge[k] and hi[k] < r):
                    ok = False
                elif (le[k] and r - lo[k] < width[k]) or (ge[k] and hi[k] - r < width[k]):
                    queue.append(k)
        if value and ok:
            for w in self.conflicts[v]:
                x = vals[w]
                if x == 1:
                    return False
                if x < 0 and not self._set(w, 0, queue):
                    return False
        return ok

    def _undo(self, mark: int) -> None:
        lo, hi, vals = self.lo, self.hi, self.vals
        trail = self.trail
        while len(trail) > mark:
            v = trail.pop()
            value = vals[v]
            for k, a in self.watch[v]:
                if (a > 0) == bool(value):
                    lo[k] -= a if value else -a
                else:
                    hi[k] -= a if value else -a
            vals[v] = -1

    def _propagate(self, queue: list[int]) -> bool:
        vals = self.vals
        lo_, hi_, le_, ge_, rhs_, width_ = self.lo, self.hi, self.le, self.ge, self.rhs, self.width
        while queue:
            k = queue.pop()
            le, ge, rhs, w = le_[k], ge_[k], rhs_[k], width_[k]
            if (le and lo_[k] > rhs) or (ge and hi_[k] < rhs):
                return False
            if not ((le and rhs - lo_[k] < w) or (ge and hi_[k] - rhs < w)):
                continue
            for v, a in self.cons[k].coeffs:
                if vals[v] >= 0:
                    continue
                lo, hi = lo_[k], hi_[k]
                forced = -1
                if a > 0:
                    if le and lo + a > rhs:
                        forced = 0
                    elif ge and hi - a < rhs:
                        forced = 1
                else:
                    if ge and hi + a < rhs:
                        forced = 0
                    elif le and lo - a > rhs:
                        forced = 1
                if forced >= 0 and not self._set(v, forced, queue):
                    return False
        return True

    def _pick(self) -> int:
        vals = self.vals
        best, best_count = -1, None
        for yv, fs in self.ridge_rows:
            if vals[yv] != 1:
                continue
            chosen = 0
            free = []
            for i in fs:
                x = vals[i]
                if x == 1:
                    chosen += 1
                elif x < 0:
                    free.append(i)
            if chosen == 1 and free and (best_count is None or len(free) < best_count):
                best, best_count = free[0], len(free)
                if best_count == 1:
                    break
        if best >= 0:
            return best
        for v in self.order:
            if vals[v] < 0:
                return v
        return -1

    def run(self) -> Iterator[list[int]]:
        if not self._propagate(list(range(len(self.cons)))):
            return
        yield from self._branch()

    def _branch(self) -> Iterator[list[int]]:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"search exceeded {self.max_nodes} nodes")
        v = self._pick()
        if v < 0:
            if all(c.holds(self.vals) for c in self.all_cons):
                yield list(self.vals)
            return
        for value in (1, 0):
            mark = len(self.trail)
            queue: list[int] = []
            if self._set(v, value, queue) and self._propagate(queue):
                yield from self._branch()
            self._undo(mark)


def enumerate_solutions(
    inst: FeasibilityInstance, mode: str = "backtrack", max_nodes: int | None = None
) -> Iterator[SolutionMask]:
    """Every satisfying 0/1 assignment exactly once, in a deterministic order.

    ``mode="blocking"`` instead re-solves from scratch, each time adding the
    cut ``sum(x_i for i in S) <= f3 - 1`` for every solution ``S`` found so far.
    """
    if mode == "backtrack":
        for vals in _Search(inst, max_nodes=max_nodes).run():
            yield inst.mask(vals)
        return
    if mode != "blocking":
        raise ValueError(f"unknown mode {mode!r}")
    cuts: list[Constraint] = []
    while True:
        search = _Search(inst, cuts, max_nodes=max_nodes)
        vals = next(search.run(), None)
        if vals is None:
            return
        sol = inst.mask(vals)
        yield sol
        if inst.facets:
            # with sum(x) = f3 fixed this removes exactly the facet set S,
            # and the ridge variables are determined by the facets
            chosen = sorted(sol.facets)
            cuts.append(_constraint({i: 1 for i in chosen}, "<=", len(chosen) - 1, "cut"))
        else:
            ones = [v for v in range(inst.n_vars) if vals[v]]
            terms = {v: (1 if vals[v] else -1) for v in range(inst.n_vars)}
            cuts.append(_constraint(terms, "<=", len(ones) - 1, "no-good"))
