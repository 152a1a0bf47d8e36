import json
import random
import time
from dataclasses import replace
from itertools import combinations, permutations

import pytest

from spherecensus.chirotope import (
    Certificate,
    MalformedStep,
    SeedError,
    basis5,
    certify,
    check_certificate,
    chirotope_from_points,
    contradiction_search,
    gp_admissible,
    gp_products,
    is_violation,
    perm_sign,
    propagate,
    relabel_certificate,
    seed,
    seed_is_nondegenerate,
    verify_certificate,
    violated_relations,
)
from spherecensus.geometry import hull_facets, parse_points
from spherecensus.lattice import FaceLattice, lattice_code

from conftest import SPHERES
from oracles import cyclic_points, gale_facets, vandermonde_sign

BASE = (0, 2, 4, 9)

# Signs derived by hand for the first (10,32,33,11) sphere from the seed
# chi(0,2,4,9,v) = +1, keyed by the ordered 5-tuple as written there.
HAND_SIGNS = {
    (3, 5, 6, 8, 9): 0,
    (0, 1, 2, 4, 9): -1, (1, 2, 4, 5, 9): 1, (2, 4, 5, 8, 9): -1,
    (0, 2, 4, 8, 9): -1, (0, 1, 2, 4, 8): 1, (1, 2, 4, 6, 8): -1, (2, 4, 6, 8, 9): -1,
    (0, 2, 4, 7, 8): 1, (2, 4, 7, 8, 9): 1,
    (0, 2, 4, 5, 8): 1, (0, 2, 5, 6, 8): -1, (0, 2, 3, 6, 8): -1, (0, 1, 3, 6, 8): -1,
    (1, 3, 6, 8, 9): -1, (2, 3, 6, 8, 9): -1,
    (0, 2, 4, 6, 9): -1, (0, 1, 2, 4, 6): 1, (0, 1, 4, 6, 8): 1, (1, 4, 6, 8, 9): 1,
    (0, 2, 3, 5, 8): 1, (0, 3, 5, 7, 8): 1, (0, 1, 5, 7, 8): 1, (1, 5, 7, 8, 9): 1,
    (0, 1, 3, 4, 6): 1, (1, 3, 4, 6, 9): 1, (0, 1, 3, 6, 9): 1, (0, 3, 6, 7, 9): 1,
    (3, 6, 7, 8, 9): -1,
    (0, 1, 6, 7, 9): -1, (1, 6, 7, 8, 9): 1,
    (0, 3, 4, 6, 8): 1, (3, 4, 6, 8, 9): 1,
    (0, 1, 2, 7, 8): -1, (1, 2, 5, 7, 8): -1, (2, 5, 7, 8, 9): -1,
    (1, 2, 3, 7, 8): -1, (1, 3, 7, 8, 9): 1, (3, 5, 7, 8, 9): 1,
    (7, 8, 9, 5, 6): -1, (6, 8, 9, 2, 5): -1, (6, 8, 9, 4, 7): -1, (6, 8, 9, 4, 5): -1,
    (5, 8, 9, 4, 7): 1,
}


@pytest.fixture(scope="module")
def first(lattices):
    return lattices["sphere_10_32_33_0"]


@pytest.fixture(scope="module")
def result(first):
    return certify(first, BASE)


def test_hand_signs_are_reproduced(result):
    assert len(HAND_SIGNS) == 44
    chi = result.chirotope
    for b, v in HAND_SIGNS.items():
        assert chi.get(b) == v, b


def test_final_relation(result):
    cert = result.certificate
    assert cert is not None
    assert set(cert.sigma) == {4, 8, 9} and set(cert.quad) == {2, 5, 6, 7}
    assert cert.products == [1, 1, 1]
    assert not gp_admissible(cert.products)


def test_certificate_verifies_and_round_trips(result, first):
    cert = result.certificate
    assert verify_certificate(cert, first)
    d = json.loads(json.dumps(cert.to_json()))
    assert verify_certificate(d, first)
    assert Certificate.from_json(d).to_json() == d


def test_certify_is_fast(first):
    t0 = time.perf_counter()
    res = certify(first, BASE)
    assert res.certificate is not None
    assert time.perf_counter() - t0 < 10


def test_flipping_a_step_is_caught(result, first):
    cert = result.certificate
    for i, st in enumerate(cert.steps):
        if st.rule not in ("facet-side", "gp-propagate"):
            continue
        bad = replace(cert, steps=list(cert.steps))
        bad.steps[i] = replace(st, sign=-st.sign)
        ok, index, _ = check_certificate(bad, first)
        assert not ok and index == i


def test_flipping_one_seed_is_caught(result, first):
    cert = result.certificate
    seeds = [i for i, s in enumerate(cert.steps) if s.rule == "seed"]
    assert len(seeds) >= 2
    i = seeds[-1]
    bad = replace(cert, steps=list(cert.steps))
    bad.steps[i] = replace(cert.steps[i], sign=-cert.steps[i].sign)
    ok, index, _ = check_certificate(bad, first)
    assert not ok and index == i


def test_flipping_every_seed_is_a_reflection(result, first):
    cert = result.certificate
    steps = [replace(s, sign=-s.sign) for s in cert.steps]
    flipped = replace(cert, steps=steps, products=list(cert.products))
    assert verify_certificate(flipped, first)


def test_wrong_products_or_truncation_fail(result, first):
    cert = result.certificate
    assert not verify_certificate(replace(cert, products=[1, 1, -1]), first)
    assert not verify_certificate(replace(cert, steps=cert.steps[:-1]), first)


def test_malformed_steps_raise_with_index(result, first):
    d = result.certificate.to_json()
    for mutate in (
        lambda s: s["conclusion"].update(basis=[0, 1, 2]),
        lambda s: s["conclusion"].update(sign=2),
        lambda s: s.update(rule="magic"),
        lambda s: s["conclusion"].update(basis=[0, 1, 2, 3, 99]),
    ):
        bad = json.loads(json.dumps(d))
        mutate(bad["steps"][5])
        with pytest.raises(MalformedStep) as exc:
            verify_certificate(bad, first)
        assert exc.value.index == 5
    bad = json.loads(json.dumps(d))
    del bad["steps"][3]["conclusion"]
    with pytest.raises(MalformedStep) as exc:
        verify_certificate(bad, first)
    assert exc.value.index == 3


def test_certificate_survives_relabeling(result, first):
    cert = result.certificate
    rng = random.Random(0)
    for _ in range(5):
        perm = list(range(first.n_vertices))
        rng.shuffle(perm)
        M = FaceLattice.from_facets([[perm[v] for v in f] for f in first.facet_list()])
        assert lattice_code(M) == lattice_code(first)
        assert verify_certificate(relabel_certificate(cert, perm), M)


def test_certificate_survives_automorphisms(result, first):
    autos = _automorphisms(first)
    assert list(range(first.n_vertices)) in autos
    for perm in autos:
        assert verify_certificate(relabel_certificate(result.certificate, perm), first)


def _automorphisms(L):
    """Brute-force vertex automorphisms, matched level by level."""
    n = L.n_vertices
    facets = [frozenset(f) for f in L.facet_list()]
    fset = set(facets)
    sig = [tuple(sorted(len(f) for f in facets if v in f)) for v in range(n)]
    out = []

    def extend(perm):
        k = len(perm)
        if k == n:
            if {frozenset(perm[v] for v in f) for f in facets} == fset:
                out.append(list(perm))
            return
        for w in range(n):
            if w in perm or sig[w] != sig[k]:
                continue
            perm.append(w)
            # the image of the mapped part of each facet must fit inside some facet
            if all(
                any(frozenset(perm[v] for v in f if v <= k) <= g for g in fset)
                for f in facets
            ):
                extend(perm)
            perm.pop()

    extend([])
    return out


def test_base_in_ridge_is_rejected(first):
    ridge = sorted(next(r for r in first.faces(2) if len(r) >= 4))
    with pytest.raises(SeedError):
        seed(first, ridge[:4])
    loose = next(
        b for b in combinations(range(first.n_vertices), 4)
        if not any(set(b) <= set(f) for f in first.facet_list())
    )
    with pytest.raises(SeedError):
        seed(first, loose)
    with pytest.raises(SeedError):
        seed(first, (0, 0, 2, 4))


def test_simplex_seed_has_no_zeros(lattices):
    L = lattices["simplex_boundary"]
    chi = seed(L, (0, 1, 2, 3))
    assert chi.values == {(0, 1, 2, 3, 4): 1}
    full = propagate(chi, L)
    assert full.is_total()
    assert contradiction_search(full) is None


def test_cyclic_signs_match_vandermonde():
    pts = cyclic_points(8)
    chi = chirotope_from_points(pts)
    for b in combinations(range(8), 5):
        assert chi.get(b) == vandermonde_sign([t + 1 for t in b])
    assert chi.get((1, 0, 2, 3, 4)) == -chi.get((0, 1, 2, 3, 4))


def test_hyperplane_points_give_zero():
    pts = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 1, 1, 0)]
    assert chirotope_from_points(pts).get(range(5)) == 0
    with pytest.raises(TypeError):
        chirotope_from_points([(0.5, 0, 0, 0)] * 5)
    with pytest.raises(ValueError):
        chirotope_from_points([(0, 0, 0)] * 5)


def test_basis_helpers():
    assert perm_sign([1, 0, 2]) == -1
    assert perm_sign([0, 0, 1]) == 0
    assert basis5((4, 3, 2, 1, 0)) == ((0, 1, 2, 3, 4), 1)
    assert basis5((1, 0, 2, 3, 4)) == ((0, 1, 2, 3, 4), -1)
    assert gp_admissible([0, 0, 0]) and gp_admissible([1, -1, 0])
    assert not gp_admissible([1, 1, 0]) and not gp_admissible([-1, -1, -1])
    assert is_violation([1, 1, 1]) and not is_violation([1, 1, 0])
    assert is_violation([1, 1, 0], strict=False)
    assert not is_violation([None, 1, 1], strict=False)


REALIZABLE = {
    "cyclic": [tuple(t ** k for k in range(1, 5)) for t in range(1, 8)],
    "prism-product": [a + b for a in [(0, 0), (1, 0), (0, 1)] for b in [(0, 0), (1, 0), (0, 1)]],
    "simplex": [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
}


@pytest.mark.parametrize("name", sorted(REALIZABLE))
def test_soundness_on_realizable_spheres(name):
    pts = parse_points(REALIZABLE[name])
    facets = hull_facets(pts)
    L = FaceLattice.from_facets(facets, len(pts))
    assert L.is_eulerian()
    real = chirotope_from_points(pts)
    assert violated_relations(real, strict=False) == []
    for sigma_quad in _sample_relations(len(pts)):
        assert gp_admissible(gp_products(real.get, *sigma_quad))
    checked = 0
    for F in facets:
        for base in combinations(sorted(F), 4):
            try:
                chi = propagate(seed(L, base), L)
            except SeedError:
                continue
            out = next(v for v in range(len(pts)) if v not in F)
            eps = real.get(base + (out,))
            assert eps != 0
            for b, v in chi.values.items():
                assert real.get(b) * eps == v, (base, b)
            assert contradiction_search(chi) is None
            assert contradiction_search(chi, strict=False) is None
            assert not chi.facet_conflicts
            checked += 1
    assert checked > 0


def _sample_relations(n):
    for sigma in combinations(range(n), 3):
        rest = [v for v in range(n) if v not in sigma]
        for quad in combinations(rest, 4):
            yield sigma, quad


def test_gale_matches_hull():
    pts = cyclic_points(7)
    assert {frozenset(f) for f in hull_facets(pts)} == gale_facets(7)


@pytest.mark.parametrize("name", SPHERES)
def test_every_known_sphere_has_a_certificate(lattices, name):
    L = lattices[name]
    for F in L.facet_list():
        for base in combinations(F, 4):
            if seed_is_nondegenerate(L, base):
                res = certify(L, base)
                assert res.certificate is not None
                assert verify_certificate(res.certificate, L)
                return
    pytest.fail("no nondegenerate base")


def test_case_split(first):
    res = certify(first, BASE, case_split=True)
    assert res.degenerate is not None
    assert seed_is_nondegenerate(first, BASE) in (True, False)
    zero_seeds = [s for s in res.degenerate.chirotope.steps if s.rule == "seed"]
    assert zero_seeds and all(s.sign == 0 for s in zero_seeds)
    if res.decided:
        assert verify_certificate(res.degenerate.certificate, first)


def test_target_relation(first):
    res = certify(first, BASE, target=((4, 8, 9), (2, 5, 6, 7)))
    assert res.certificate.products == [1, 1, 1]
    assert certify(first, BASE, target=((0, 1, 2), (3, 4, 5, 6))).certificate is None


def test_final_products_do_not_depend_on_sigma_order(result):
    # reordering sigma multiplies both factors of each product by the same sign
    chi = result.chirotope
    base = gp_products(chi.get, (4, 8, 9), (2, 5, 6, 7))
    for s in permutations((4, 8, 9)):
        assert gp_products(chi.get, s, (2, 5, 6, 7)) == base
