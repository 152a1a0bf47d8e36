import random
from itertools import combinations

import networkx as nx
import pytest

from spherecensus.lattice import FaceLattice, LatticeError, hasse_code, lattice_code

from conftest import SPHERES, load_json

F_VECTORS = {
    "sphere_10_32_33_0": (10, 32, 33, 11),
    "sphere_10_32_33_1": (10, 32, 33, 11),
    "sphere_10_33_35_12": (10, 33, 35, 12),
    "sphere_11_35_0": (11, 35, 35, 11),
    "sphere_11_35_1": (11, 35, 35, 11),
}


def incidence_graph(L):
    """Vertex-facet incidence graph, the isomorphism oracle for lattice codes."""
    h = nx.Graph()
    n = L.n_vertices
    h.add_nodes_from(range(n), side=0)
    for i, f in enumerate(L.faces(3)):
        h.add_node(n + i, side=1)
        h.add_edges_from((v, n + i) for v in f)
    return h


def isomorphic(a, b):
    return nx.is_isomorphic(
        incidence_graph(a), incidence_graph(b), node_match=lambda x, y: x["side"] == y["side"]
    )


@pytest.mark.parametrize("name", SPHERES)
def test_known_spheres_pass_the_predicates(lattices, name):
    L = lattices[name]
    assert L.is_graded()
    assert L.is_eulerian()
    assert L.is_interval_connected()
    assert L.has_intersection_property()
    assert L.is_lattice()
    assert tuple(L.f_vector()) == F_VECTORS[name]
    assert tuple(L.f_vector()) == tuple(load_json(name)["f"])


def test_simplex(lattices):
    L = lattices["simplex_boundary"]
    assert tuple(L.f_vector()) == (5, 10, 10, 5)
    assert L.is_eulerian() and L.is_interval_connected() and L.is_2s2s()
    assert L.flag_f03() == 20
    assert lattice_code(L.dual()) == lattice_code(L)


@pytest.mark.parametrize("name", SPHERES)
def test_deleting_a_facet_breaks_eulerianity(name):
    facets = load_json(name)["facets"]
    for drop in range(0, len(facets), 4):
        L = FaceLattice.from_facets(facets[:drop] + facets[drop + 1 :])
        assert not L.is_eulerian()


def test_disjoint_union_is_not_interval_connected():
    simplex = [[v for v in range(5) if v != i] for i in range(5)]
    shifted = [[v + 5 for v in f] for f in simplex]
    L = FaceLattice.from_facets(simplex + shifted)
    assert not L.is_interval_connected()


def test_intersection_property_failure():
    assert FaceLattice.from_facets([[0, 1, 2, 3], [0, 1, 2, 4]]).has_intersection_property()
    # a digon: two edges on the same pair of vertices
    bad = FaceLattice.from_ranked(
        2,
        [[frozenset({0}), frozenset({1})], [frozenset({0, 1}), frozenset({0, 1})]],
        [[], [(0, 1), (0, 1)]],
    )
    assert not bad.has_intersection_property()
    assert lattice_code(bad).startswith("H")
    assert lattice_code(bad) == hasse_code(bad)


def test_errors():
    with pytest.raises(LatticeError):
        FaceLattice.from_facets([])
    with pytest.raises(LatticeError):
        FaceLattice.from_facets([[0, 1, 2, 3], [0, 1, 2, 3]])
    with pytest.raises(LatticeError):
        FaceLattice.from_facets([[0, 1, 3]])


def test_duality_pair(lattices):
    a, b = lattices["sphere_11_35_0"], lattices["sphere_11_35_1"]
    assert lattice_code(a.dual()) == lattice_code(b)
    assert lattice_code(b.dual()) == lattice_code(a)
    assert isomorphic(a.dual(), b)
    assert lattice_code(a) != lattice_code(b)


@pytest.mark.parametrize("name", SPHERES + ["simplex_boundary"])
def test_double_dual_is_identity(lattices, name):
    L = lattices[name]
    DD = L.dual().dual()
    assert DD.sets == L.sets
    assert DD.ranks == L.ranks
    assert DD.lower_covers == L.lower_covers
    assert tuple(L.dual().f_vector()) == tuple(reversed(L.f_vector()))


@pytest.mark.parametrize("name", SPHERES)
def test_code_is_invariant_under_relabeling(lattices, name):
    L = lattices[name]
    rng = random.Random(name)
    for _ in range(5):
        perm = list(range(L.n_vertices))
        rng.shuffle(perm)
        M = FaceLattice.from_facets([[perm[v] for v in f] for f in L.facet_list()])
        assert lattice_code(M) == lattice_code(L)
        assert lattice_code(L.relabel(perm)) == lattice_code(L)


def test_codes_agree_with_isomorphism_oracle(lattices):
    names = SPHERES + ["simplex_boundary"]
    pool = [lattices[n] for n in names] + [lattices[n].dual() for n in names]
    for a, b in combinations(pool, 2):
        assert (lattice_code(a) == lattice_code(b)) == isomorphic(a, b)


def test_json_round_trip(lattices):
    L = lattices["sphere_10_32_33_0"]
    M = FaceLattice.from_json(L.to_json())
    assert M.sets == L.sets and M.ranks == L.ranks
    assert lattice_code(M) == lattice_code(L)


def test_known_spheres_are_not_2s2s(lattices):
    for name in SPHERES:
        assert not lattices[name].is_2s2s()
