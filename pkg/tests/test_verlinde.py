from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from loom.arith import sin2_interval
from loom.errors import DegreeOutOfRange, InvalidInput, InvalidWeight, UnsupportedRange
from loom.verlinde import (
    VerlindeQuery,
    level_weights,
    rotate_subset,
    smatrix_oracle,
    subsets_colex,
    verlinde_number,
    verlinde_terms,
    weight_for_degree,
    weight_to_subset,
)


def test_query_validation():
    with pytest.raises(InvalidInput):
        VerlindeQuery(1, 2, 0)
    with pytest.raises(InvalidInput):
        VerlindeQuery(2, -1, 0)
    with pytest.raises(UnsupportedRange):
        VerlindeQuery(10, 7, 1)
    with pytest.raises(UnsupportedRange):
        VerlindeQuery(2, 1, 9)


@pytest.mark.parametrize("r,c,g,expected", [(3, 2, 1, 6), (2, 2, 2, 10), (2, 1, 2, 4), (3, 0, 3, 1)])
def test_examples(r, c, g, expected):
    q = VerlindeQuery(r, c, g)
    assert verlinde_number(q) == expected
    assert verlinde_number(q, "exact") == expected


def test_unknown_backend():
    with pytest.raises(InvalidInput):
        verlinde_number(VerlindeQuery(2, 1, 1), "float")


def test_subsets_colex_order():
    assert subsets_colex(4, 2) == [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)]


def test_term_examples():
    terms = dict(verlinde_terms(VerlindeQuery(2, 2, 2)))
    assert terms[(2, 1)].contains(8)
    assert [t.contains(8) or t.contains(4) for t in terms.values()] == [True] * 6
    for _, t in verlinde_terms(VerlindeQuery(2, 1, 3)):
        assert t.contains(9)
    for _, t in verlinde_terms(VerlindeQuery(3, 2, 1)):
        assert t.contains(1) and t.width() == 0


@pytest.mark.parametrize("r,c,g", [(2, 3, 2), (3, 2, 3), (4, 1, 2)])
def test_rotation_invariance(r, c, g):
    q = VerlindeQuery(r, c, g)
    terms = dict(verlinde_terms(q))
    for S, value in terms.items():
        other = terms[rotate_subset(S, q.n)]
        assert value.lo_exact() <= other.hi_exact() and other.lo_exact() <= value.hi_exact()


def test_weight_dictionary():
    assert weight_to_subset((0, 0), 3, 2) == (3, 2, 1)
    assert weight_to_subset((1,), 2, 1) == (3, 1)
    assert weight_to_subset((2, 1), 3, 2) == (5, 3, 1)
    assert weight_for_degree(3, 2, 1) == (2, 2)
    assert weight_for_degree(2, 5, 1) == (5,)
    assert weight_for_degree(4, 1, 3) == (1, 0, 0)
    with pytest.raises(DegreeOutOfRange):
        weight_for_degree(3, 1, 3)
    with pytest.raises(InvalidWeight):
        weight_to_subset((1, 2), 3, 2)
    with pytest.raises(InvalidWeight):
        weight_to_subset((3,), 2, 2)


@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("c", range(5))
def test_weights_map_into_subsets(r, c):
    subs = set(subsets_colex(r + c, r))
    ws = level_weights(r, c)
    assert len(ws) == comb(r + c - 1, r - 1)
    assert all(weight_to_subset(w, r, c) in subs for w in ws)
    assert len({weight_to_subset(w, r, c) for w in ws}) == len(ws)


def test_oracle_anchors():
    assert smatrix_oracle(VerlindeQuery(2, 1, 2)) == 4
    assert smatrix_oracle(VerlindeQuery(2, 2, 2)) == 10


@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("g", range(5))
def test_backends_and_oracle_agree(r, g):
    for c in range(5):
        q = VerlindeQuery(r, c, g)
        value = verlinde_number(q)
        assert value >= 1
        assert value == verlinde_number(q, "exact") == smatrix_oracle(q)
        if g == 1:
            assert value == comb(r + c - 1, r - 1)
        if c == 1:
            assert value == r**g


def test_precision_override(monkeypatch):
    monkeypatch.setenv("LOOM_PREC_BITS", "64")
    assert verlinde_number(VerlindeQuery(3, 3, 4)) == verlinde_number(VerlindeQuery(3, 3, 4), "exact")


def test_sine_intervals_are_tight():
    iv = sin2_interval(1, 6, 128)
    assert iv.contains(1) and iv.width() < Fraction(1, 10**30)
