"""Partial rank-5 chirotopes forced by a sphere's facets, sign propagation and
Grassmann-Pluecker contradiction certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .geometry import orientation, parse_points
from .lattice import FaceLattice

RANK = 5


class SeedError(ValueError):
    """The requested seed basis is unusable."""


class MalformedStep(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has repeated entries."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def basis5(seq: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Normalize an ordered 5-tuple to (sorted tuple, permutation sign)."""
    if len(seq) != RANK:
        raise ValueError(f"a basis has {RANK} entries, got {len(seq)}")
    return tuple(sorted(seq)), perm_sign(seq)


def gp_products(get, sigma: Sequence[int], quad: Sequence[int]):
    """The three signed 3-term Grassmann-Pluecker products; None marks an unknown product."""
    s = tuple(sigma)
    t1, t2, t3, t4 = quad
    pairs = [((t1, t2), (t3, t4), 1), ((t1, t3), (t2, t4), -1), ((t1, t4), (t2, t3), 1)]
    out = []
    for a, b, c in pairs:
        x, y = get(s + a), get(s + b)
        if x == 0 or y == 0:
            out.append(0)
        elif x is None or y is None:
            out.append(None)
        else:
            out.append(c * x * y)
    return out


def relations(n: int):
    """All (sigma, quad) pairs in descending lexicographic order."""
    for sigma in sorted(combinations(range(n), 3), reverse=True):
        rest = [v for v in range(n) if v not in sigma]
        for quad in sorted(combinations(rest, 4), reverse=True):
            yield sigma, quad


def gp_admissible(products: Iterable[int]) -> bool:
    p = set(products)
    return p == {0} or {-1, 1} <= p


@dataclass
class DerivationStep:
    rule: str  # seed | coplanar-zero | facet-side | gp-propagate
    premises: list[tuple[int, ...]]
    conclusion: tuple[int, ...]
    sign: int
    facet: tuple[int, ...] | None = None
    sigma: tuple[int, ...] | None = None
    quad: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        d = {
            "rule": self.rule,
            "premises": [list(p) for p in self.premises],
            "conclusion": {"basis": list(self.conclusion), "sign": self.sign},
        }
        if self.facet is not None:
            d["facet"] = list(self.facet)
        if self.sigma is not None:
            d["sigma"] = list(self.sigma)
            d["quad"] = list(self.quad)
        return d


class PartialChirotope:
    """Alternating sign map on 5-subsets of ``range(n)``; missing keys are unknown."""

    def __init__(self, n: int, values: dict[tuple[int, ...], int] | None = None):
        self.n = n
        self.values: dict[tuple[int, ...], int] = dict(values or {})
        self.reason: dict[tuple[int, ...], int] = {}
        self.steps: list[DerivationStep] = []
        self.base: tuple[int, ...] | None = None
        self.base_facet: tuple[int, ...] | None = None

    def get(self, seq: Sequence[int]) -> int | None:
        key, s = basis5(seq)
        if s == 0:
            return 0
        v = self.values.get(key)
        return None if v is None else s * v

    def __getitem__(self, seq: Sequence[int]) -> int | None:
        return self.get(seq)

    def known(self) -> int:
        return len(self.values)

    def is_total(self) -> bool:
        return all(b in self.values for b in combinations(range(self.n), RANK))

    def record(self, step: DerivationStep) -> tuple[int, ...]:
        key, s = basis5(step.conclusion)
        self.values[key] = s * step.sign
        self.reason[key] = len(self.steps)
        self.steps.append(step)
        return key

    def copy(self) -> "PartialChirotope":
        c = PartialChirotope(self.n, self.values)
        c.reason = dict(self.reason)
        c.steps = list(self.steps)
        c.base, c.base_facet = self.base, self.base_facet
        return c


def chirotope_from_points(points: Sequence[Sequence]) -> PartialChirotope:
    pts = parse_points(points)
    if len(pts) < RANK:
        raise ValueError("need at least 5 points")
    if any(len(p) != RANK - 1 for p in pts):
        raise ValueError("points must be 4-dimensional")
    chi = PartialChirotope(len(pts))
    for b in combinations(range(len(pts)), RANK):
        chi.values[b] = orientation([pts[i] for i in b])
    return chi


# -- seeding and propagation ------------------------------------------------


def _facet_sets(L: FaceLattice) -> list[frozenset[int]]:
    return L.faces(3)


def seed(L: FaceLattice, base: Sequence[int], degenerate: bool = False) -> PartialChirotope:
    """χ(base, v) = +1 (or 0 in the degenerate branch) beyond the facet holding base; zeros inside facets."""
    base = tuple(base)
    if len(set(base)) != 4:
        raise SeedError("base must be 4 distinct vertices")
    bset = frozenset(base)
    holders = [F for F in _facet_sets(L) if bset <= F]
    if not holders:
        raise SeedError(f"{list(base)} is not contained in a facet")
    if any(bset <= R for R in L.faces(2)):
        raise SeedError(f"{list(base)} lies inside a ridge, so the seed would be forced to 0")
    F = holders[0]
    chi = PartialChirotope(L.n_vertices)
    chi.base, chi.base_facet = base, tuple(sorted(F))
    val = 0 if degenerate else 1
    for v in range(L.n_vertices):
        if v not in F:
            chi.record(DerivationStep("seed", [], base + (v,), val, facet=chi.base_facet))
    for G in _facet_sets(L):
        if len(G) >= RANK:
            for b in combinations(sorted(G), RANK):
                if b not in chi.values:
                    chi.record(DerivationStep("coplanar-zero", [], b, 0, facet=tuple(sorted(G))))
    return chi


class _Propagator:
    def __init__(self, chi: PartialChirotope, L: FaceLattice):
        self.chi = chi
        self.n = chi.n
        self.facets = [frozenset(F) for F in _facet_sets(L)]
        self.conflicts: list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = []

    def facet_side_closure(self, queue: list[tuple[int, ...]]) -> None:
        """Apply the facet-side rule from each queued nonzero value, breadth first."""
        chi = self.chi
        head = 0
        while head < len(queue):
            key = queue[head]
            head += 1
            val = chi.values[key]
            if val == 0:
                continue
            for u in key:
                S = tuple(x for x in key if x != u)
                Sset = frozenset(S)
                for F in self.facets:
                    if u in F or not Sset <= F:
                        continue
                    premise = S + (u,)
                    sval = chi.get(premise)
                    for v in range(self.n):
                        if v in F:
                            continue
                        concl = S + (v,)
                        have = chi.get(concl)
                        if have is None:
                            step = DerivationStep("facet-side", [premise], concl, sval, facet=tuple(sorted(F)))
                            queue.append(chi.record(step))
                        elif have != sval:
                            self.conflicts.append((premise, concl, tuple(sorted(F))))

    def gp_pass(self) -> list[tuple[int, ...]]:
        """One sweep over all 3-term relations; returns the newly forced bases."""
        chi = self.chi
        new = []
        for sigma, quad in relations(self.n):
            forced = self._force(sigma, quad)
            if forced is not None:
                new.append(chi.record(forced))
        return new

    def _force(self, sigma, quad) -> DerivationStep | None:
        chi = self.chi
        t1, t2, t3, t4 = quad
        entries = [
            sigma + (t1, t2), sigma + (t3, t4), sigma + (t1, t3),
            sigma + (t2, t4), sigma + (t1, t4), sigma + (t2, t3),
        ]
        vals = [chi.get(e) for e in entries]
        relevant = []
        for k in range(0, 6, 2):
            if vals[k] == 0 or vals[k + 1] == 0:
                continue
            relevant.extend(j for j in (k, k + 1) if vals[j] is None)
        if len(relevant) != 1:
            return None
        j = relevant[0]
        options = []
        for s in (-1, 0, 1):
            trial = dict(zip(map(tuple, entries), vals))
            trial[entries[j]] = s
            if gp_admissible(gp_products(lambda b: trial[b], sigma, quad)):
                options.append(s)
        if len(options) != 1:
            return None
        premises = [e for k, e in enumerate(entries) if k != j and vals[k] is not None]
        return DerivationStep("gp-propagate", premises, entries[j], options[0], sigma=sigma, quad=quad)

    def run(self) -> None:
        self.facet_side_closure([k for k, v in self.chi.values.items() if v != 0])
        while True:
            new = self.gp_pass()
            if not new:
                return
            self.facet_side_closure(new)


def propagate(chi: PartialChirotope, L: FaceLattice) -> PartialChirotope:
    """Closure under the facet-side rule and 3-term Grassmann-Pluecker forcing. Returns a new object."""
    out = chi.copy()
    p = _Propagator(out, L)
    p.run()
    out.facet_conflicts = p.conflicts  # type: ignore[attr-defined]
    return out


# -- certificates -----------------------------------------------------------


@dataclass
class Certificate:
    steps: list[DerivationStep]
    sigma: tuple[int, ...]
    quad: tuple[int, ...]
    products: list[int]
    base: tuple[int, ...] | None = None
    violations: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "base": list(self.base) if self.base else None,
            "steps": [s.to_json() for s in self.steps],
            "violation": {"sigma": list(self.sigma), "quad": list(self.quad), "products": self.products},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        steps = []
        for i, s in enumerate(d.get("steps", [])):
            try:
                c = s["conclusion"]
                steps.append(
                    DerivationStep(
                        rule=s["rule"],
                        premises=[tuple(p) for p in s.get("premises", [])],
                        conclusion=tuple(c["basis"]),
                        sign=int(c["sign"]),
                        facet=tuple(s["facet"]) if s.get("facet") is not None else None,
                        sigma=tuple(s["sigma"]) if s.get("sigma") is not None else None,
                        quad=tuple(s["quad"]) if s.get("quad") is not None else None,
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedStep(i, f"unreadable step ({exc})") from exc
        v = d["violation"]
        return cls(
            steps,
            tuple(v["sigma"]),
            tuple(v["quad"]),
            list(v["products"]),
            tuple(d["base"]) if d.get("base") else None,
        )


def is_violation(products: Sequence[int | None], strict: bool = True) -> bool:
    """Known and inadmissible; ``strict`` further requires three equal nonzero products."""
    if None in products:
        return False
    if strict:
        return products[0] != 0 and products[0] == products[1] == products[2]
    return not gp_admissible(products)


def violated_relations(
    chi: PartialChirotope, strict: bool = True
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All violated (sigma, quad) in sweep order."""
    return [
        (sigma, quad)
        for sigma, quad in relations(chi.n)
        if is_violation(gp_products(chi.get, sigma, quad), strict)
    ]


def _needed_steps(chi: PartialChirotope, bases: Iterable[Sequence[int]]) -> list[DerivationStep]:
    need: set[int] = set()
    stack = [basis5(b)[0] for b in bases]
    while stack:
        key = stack.pop()
        i = chi.reason.get(key)
        if i is None or i in need:
            continue
        need.add(i)
        stack.extend(basis5(p)[0] for p in chi.steps[i].premises)
    return [chi.steps[i] for i in sorted(need)]


def _relation_entries(sigma, quad) -> list[tuple[int, ...]]:
    t1, t2, t3, t4 = quad
    s = tuple(sigma)
    return [s + (t1, t2), s + (t3, t4), s + (t1, t3), s + (t2, t4), s + (t1, t4), s + (t2, t3)]


def contradiction_search(
    chi: PartialChirotope,
    target: tuple[Sequence[int], Sequence[int]] | None = None,
    strict: bool = True,
) -> Certificate | None:
    """First violated 3-term relation (or ``target`` if it is violated), with a minimal trace.

    By default only relations with three equal nonzero products count; ``strict=False``
    also accepts mixes such as {0, -1}, which are equally inadmissible.
    """
    found = violated_relations(chi, strict)
    if not found:
        return None
    pick = found[0]
    if target is not None:
        t = (tuple(target[0]), tuple(target[1]))
        norm = (tuple(sorted(t[0])), tuple(sorted(t[1])))
        if norm not in found:
            return None
        pick = t
    sigma, quad = pick
    entries = _relation_entries(sigma, quad)
    products = gp_products(chi.get, sigma, quad)
    steps = _needed_steps(chi, [e for e in entries if chi.get(e) is not None])
    return Certificate(steps, tuple(sigma), tuple(quad), products, chi.base, found)


@dataclass
class CertifyResult:
    certificate: Certificate | None
    chirotope: PartialChirotope
    degenerate: "CertifyResult | None" = None

    @property
    def decided(self) -> bool:
        if self.certificate is None:
            return False
        return self.degenerate is None or self.degenerate.certificate is not None


def certify(L: FaceLattice, base: Sequence[int], case_split: bool = False, target=None) -> CertifyResult:
    chi = propagate(seed(L, base), L)
    res = CertifyResult(contradiction_search(chi, target), chi)
    if case_split:
        chi0 = propagate(seed(L, base, degenerate=True), L)
        res.degenerate = CertifyResult(contradiction_search(chi0), chi0)
    return res


def seed_is_nondegenerate(L: FaceLattice, base: Sequence[int]) -> bool:
    """True when every realization has the base spanning its facet's hyperplane.

    In a 3-polytope with five vertices, four vertices not on a common 2-face are
    never coplanar, so the seed sign is necessarily nonzero there.
    """
    bset = frozenset(base)
    holders = [F for F in _facet_sets(L) if bset <= F]
    return bool(holders) and len(holders[0]) == 5 and not any(bset <= R for R in L.faces(2))


# -- replay -----------------------------------------------------------------


def _check_basis(i: int, b, n: int) -> tuple[int, ...]:
    b = tuple(b)
    if len(b) != RANK or len(set(b)) != RANK or not all(isinstance(x, int) and 0 <= x < n for x in b):
        raise MalformedStep(i, f"bad basis {list(b)}")
    return b


def check_certificate(cert: Certificate, L: FaceLattice) -> tuple[bool, int | None, str]:
    """Replay a certificate. Returns (ok, index of first unjustified step, reason).

    The index equals ``len(cert.steps)`` when all steps hold but the final relation does not fail.
    """
    n = L.n_vertices
    facets = {frozenset(F) for F in _facet_sets(L)}
    ridges = L.faces(2)
    chi = PartialChirotope(n)
    base = None
    for i, st in enumerate(cert.steps):
        if st.sign not in (-1, 0, 1):
            raise MalformedStep(i, f"sign {st.sign}")
        concl = _check_basis(i, st.conclusion, n)
        prem = [_check_basis(i, p, n) for p in st.premises]
        if chi.get(concl) is not None:
            return False, i, "conclusion already determined"
        F = frozenset(st.facet) if st.facet is not None else None
        if st.rule == "seed":
            if F not in facets:
                return False, i, "seed facet is not a facet"
            b = concl[:4]
            if base is None:
                base = b
            if b != base or not frozenset(b) <= F or concl[4] in F:
                return False, i, "seed does not match the base"
            if any(frozenset(b) <= R for R in ridges):
                return False, i, "seed base lies in a ridge"
            # every vertex off the base facet lies on the same side of it
            if any(s.rule == "seed" and s.sign != st.sign for s in cert.steps[:i]):
                return False, i, "seed signs disagree"
        elif st.rule == "coplanar-zero":
            if F not in facets or not frozenset(concl) <= F or st.sign != 0:
                return False, i, "not a 5-subset of a facet"
        elif st.rule == "facet-side":
            if F not in facets or len(prem) != 1:
                return False, i, "facet-side needs one premise and a facet"
            p = prem[0]
            S = frozenset(p[:4])
            if p[:4] != concl[:4] or not S <= F or p[4] in F or concl[4] in F:
                return False, i, "premise and conclusion do not fit the facet"
            pv = chi.get(p)
            if pv is None or pv == 0 or pv != st.sign:
                return False, i, "facet-side sign is not carried over"
        elif st.rule == "gp-propagate":
            if st.sigma is None or st.quad is None:
                raise MalformedStep(i, "gp step without sigma/quad")
            entries = _relation_entries(st.sigma, st.quad)
            if len(set(st.sigma) | set(st.quad)) != 7 or concl not in entries:
                return False, i, "conclusion is not in the relation"
            options = []
            for s in (-1, 0, 1):
                def val(b, s=s):
                    return s if b == concl else chi.get(b)
                prods = gp_products(val, st.sigma, st.quad)
                if None in prods:
                    continue
                if gp_admissible(prods):
                    options.append(s)
            # the unknowns that do not matter are those paired with a zero
            if options != [st.sign]:
                return False, i, "relation does not force this sign"
        else:
            raise MalformedStep(i, f"unknown rule {st.rule!r}")
        chi.record(st)
    prods = gp_products(chi.get, cert.sigma, cert.quad)
    if None in prods:
        return False, len(cert.steps), "final relation has unknown products"
    if list(prods) != list(cert.products):
        return False, len(cert.steps), "stated products differ from the replayed ones"
    if not is_violation(prods, strict=False):
        return False, len(cert.steps), "final relation is satisfied"
    return True, None, ""


def verify_certificate(cert: Certificate | dict, L: FaceLattice) -> bool:
    if isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    return check_certificate(cert, L)[0]


def relabel_certificate(cert: Certificate, perm: Sequence[int]) -> Certificate:
    def m(t):
        return None if t is None else tuple(perm[x] for x in t)

    steps = [
        DerivationStep(s.rule, [m(p) for p in s.premises], m(s.conclusion), s.sign,
                       tuple(sorted(m(s.facet))) if s.facet else None, m(s.sigma), m(s.quad))
        for s in cert.steps
    ]
    return Certificate(steps, m(cert.sigma), m(cert.quad), list(cert.products), m(cert.base))
