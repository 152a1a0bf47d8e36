from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from spherecensus.fvector import (
    CONDITIONS,
    FVector,
    candidate_stream,
    fatness,
    screen,
    size,
    steinitz3_member,
)

from oracles import steinitz_grid


def test_steinitz_examples():
    assert steinitz3_member((4, 6, 4))
    assert not steinitz3_member((5, 10, 7))


def test_steinitz_matches_grid_oracle():
    grid = steinitz_grid(30)
    for f0, f2 in product(range(31), repeat=2):
        for f1 in range(0, 61):
            assert steinitz3_member((f0, f1, f2)) == ((f0, f1, f2) in grid)


def test_screen_examples():
    assert screen((5, 10, 10, 5)).passed
    assert screen((10, 32, 33, 11)).passed
    rep = screen((6, 12, 12, 5))
    assert "euler" in rep.violated
    assert not rep.passed


def test_screen_reports_every_violation():
    rep = screen((4, 5, 5, 4))
    assert set(rep.violated) >= {"f1>=2f0", "f0>=5", "f3>=5"}


def test_screen_with_condition_subset():
    v = (6, 12, 12, 5)
    assert screen(v, conditions=("f0>=5",)).passed
    assert screen(v, conditions=("euler",)).violated == ("euler",)


def test_size():
    assert size((5, 10, 10, 5)) == 0
    assert size((10, 32, 33, 11)) == 11
    assert size((11, 35, 35, 11)) == 12


def test_fatness():
    assert fatness((10, 32, 33, 11)) == Fraction(45, 11)
    assert fatness((11, 35, 35, 11)) == Fraction(25, 6)
    with pytest.raises(ZeroDivisionError):
        fatness((5, 10, 10, 5))


def test_candidate_stream_size_zero():
    assert list(candidate_stream(0)) == [FVector(5, 10, 10, 5)]


def test_candidate_stream_size_zero_brute_force():
    found = set()
    for f0 in range(0, 11):
        f3 = 10 - f0
        for f1 in range(0, 60):
            for f2 in range(0, 60):
                if screen((f0, f1, f2, f3)).passed:
                    found.add((f0, f1, f2, f3))
    assert found == {(5, 10, 10, 5)}


def test_candidate_stream_properties():
    out = list(candidate_stream(12))
    assert out == sorted(out)
    assert len(set(out)) == len(out)
    assert all(screen(v).passed and size(v) <= 12 for v in out)
    assert FVector(10, 33, 35, 12) in out
    assert FVector(10, 32, 33, 11) in out
    assert FVector(11, 35, 35, 11) in out


def test_candidate_stream_is_closed_under_duality():
    out = set(candidate_stream(8))
    assert all(v.reversed() in out for v in out)


vectors = st.tuples(*[st.integers(0, 40)] * 4)


@given(vectors)
def test_screen_monotone_in_conditions(v):
    full = screen(v)
    for name in CONDITIONS:
        fewer = tuple(c for c in CONDITIONS if c != name)
        if full.passed:
            assert screen(v, fewer).passed


@given(vectors)
def test_reversal_symmetry(v):
    v = FVector(*v)
    assert screen(v).passed == screen(v.reversed()).passed


@given(vectors)
def test_fatness_is_exact_ratio(v):
    if size(v) != 0:
        assert fatness(v) * size(v) == v[1] + v[2] - 20


def test_fvector_parse_and_str():
    v = FVector.parse("10, 32,33,11")
    assert v == (10, 32, 33, 11)
    assert str(v) == "10,32,33,11"
    with pytest.raises(ValueError):
        FVector.parse("1,2,3")
