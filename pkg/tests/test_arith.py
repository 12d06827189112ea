from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loom.arith import (
    Cyclotomic,
    Interval,
    cyclotomic_polynomial,
    euler_phi,
    format_rational,
    parse_rational,
    sin2_exact,
    sin2_interval,
    snap_integer,
)
from loom.errors import AmbiguousSnap, InvalidInput

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q.numerator) < 10**6)


def test_rational_format_roundtrip():
    assert format_rational(Fraction(3)) == "3/1"
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert parse_rational("7") == 7
    with pytest.raises(InvalidInput):
        parse_rational("1/0")
    with pytest.raises(InvalidInput):
        parse_rational("x")


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * (1 / a) == 1
    assert parse_rational(format_rational(a)) == a
    assert a.denominator > 0 and math.gcd(a.numerator, a.denominator) == 1


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert [euler_phi(n) for n in (1, 2, 5, 8, 9, 24)] == [1, 1, 4, 4, 6, 8]


def test_sin2_trivial_values():
    assert sin2_exact(1, 6) == 1
    assert sin2_exact(2, 4) == 2


def test_sin2_sqrt2():
    x = sin2_exact(1, 4)
    assert not x.is_rational()
    assert x * x == 2


@pytest.mark.parametrize("n", range(1, 13))
def test_sin2_real_and_symmetric(n):
    for k in range(0, n + 1):
        x = sin2_exact(k, n)
        assert x.is_real()
        assert x == sin2_exact(n - k, n)


def test_cyclotomic_inverse_and_power():
    x = sin2_exact(1, 5)
    assert x * x.inverse() == 1
    assert x ** -2 * x ** 2 == 1
    assert (x + 1) / (x + 1) == 1
    with pytest.raises(ZeroDivisionError):
        Cyclotomic.from_rational(0, 20).inverse()
    with pytest.raises(InvalidInput):
        _ = x + sin2_exact(1, 6)


def test_snap_examples():
    tol = Fraction(1, 10**5)
    assert snap_integer(Interval(Fraction("3.9999991"), Fraction("4.0000009")), tol) == 4
    assert snap_integer(Interval(Fraction(-3, 10**7), Fraction(2, 10**7)), tol) == 0
    with pytest.raises(AmbiguousSnap):
        snap_integer(Interval(Fraction("3.9"), Fraction("4.1")), tol)
    with pytest.raises(AmbiguousSnap):
        snap_integer(Interval(Fraction("3.4"), Fraction("3.6")), tol)


def _random_expression(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        q = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
        return q, Interval.from_rational(q, 64)
    a, ia = _random_expression(rng, depth - 1)
    b, ib = _random_expression(rng, depth - 1)
    op = rng.choice("+-*/")
    if op == "+":
        return a + b, ia + ib
    if op == "-":
        return a - b, ia - ib
    if op == "*":
        return a * b, ia * ib
    if b == 0 or ib.contains(0):
        return a, ia
    return a / b, ia / ib


def test_interval_soundness_random_expressions():
    rng = random.Random(2024)
    for _ in range(1000):
        exact, iv = _random_expression(rng, 4)
        assert iv.lo_exact() <= iv.hi_exact()
        assert iv.contains(exact)


def test_interval_widens_outward():
    third = Interval.from_rational(Fraction(1, 3), 32)
    assert third.lo_exact() < Fraction(1, 3) < third.hi_exact()
    assert (third * 3).contains(1)
    with pytest.raises(ZeroDivisionError):
        _ = Interval.from_rational(1) / Interval(Fraction(-1), Fraction(1))


@pytest.mark.parametrize("n", range(2, 25))
def test_cyclotomic_hull_matches_floating_point(n):
    for k in range(1, n):
        hull = sin2_exact(k, n).to_interval(53)
        with mpmath.workprec(200):
            nearest = float(2 * mpmath.sin(mpmath.pi * k / n))
        assert hull.contains(nearest)
        libm = 2 * math.sin(math.pi * k / n)
        # libm rounds pi * k / n before the sine, so allow a few units of relative error
        assert math.isclose(libm, nearest, rel_tol=1e-14)
        fine = sin2_interval(k, n, 128)
        assert fine.lo_exact() <= hull.hi_exact() and hull.lo_exact() <= fine.hi_exact()
