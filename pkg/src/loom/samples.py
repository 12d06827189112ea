"""Seeded random inputs for the invariant suites.

Everything draws from a caller-supplied :class:`random.Random` (Mersenne
Twister), so a seed fixes every sample.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .laurent import Laurent, LaurentMatrix, PrecisionContext, pole_bound

_SMALL = [Fraction(x) for x in (-2, -1, 1, 2)] + [Fraction(1, 2), Fraction(-1, 2), Fraction(3)]


def random_rational(rng: random.Random, bound: int = 5) -> Fraction:
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def random_laurent(rng: random.Random, pole: int, degree: int, density: float = 0.6) -> Laurent:
    """Exact Laurent polynomial with exponents in ``[-pole, degree]``."""
    coeffs = {e: rng.choice(_SMALL) for e in range(-pole, degree + 1) if rng.random() < density}
    return Laurent(coeffs)


def random_traceless(rng: random.Random, r: int, pole: int, degree: int) -> LaurentMatrix:
    rows = [[random_laurent(rng, pole, degree) for _ in range(r)] for _ in range(r)]
    partial = Laurent.zero()
    for i in range(r - 1):
        partial = partial + rows[i][i]
    rows[r - 1][r - 1] = -partial
    return LaurentMatrix(rows)


def random_negative_traceless(rng: random.Random, r: int, depth: int) -> LaurentMatrix:
    """Traceless matrix over ``k[z^-1]``."""
    return random_traceless(rng, r, depth, 0)


def _poly_in(rng: random.Random, sign: int, degree: int, constant: bool = True) -> Laurent:
    start = 0 if constant else 1
    coeffs = {sign * e: rng.choice(_SMALL) for e in range(start, degree + 1) if rng.random() < 0.7}
    if not coeffs:
        coeffs = {sign * degree: Fraction(1)}
    return Laurent(coeffs)


def random_elementary(rng: random.Random, r: int, sign: int, degree: int) -> LaurentMatrix:
    """``I + f E_ij`` with ``f`` a polynomial in ``z`` (sign +1) or ``z^-1`` (sign -1)."""
    i, j = rng.sample(range(r), 2)
    return LaurentMatrix.elementary(r, i, j, _poly_in(rng, sign, degree))


def random_sl_positive(rng: random.Random, r: int, degree: int = 1, factors: int = 2) -> LaurentMatrix:
    """Element of ``SL_r(k[z])``, a product of elementary matrices."""
    m = LaurentMatrix.identity(r)
    for _ in range(factors):
        m = m @ random_elementary(rng, r, +1, degree)
    return m


def random_sl_negative(rng: random.Random, r: int, degree: int = 1, factors: int = 2) -> LaurentMatrix:
    """Element of ``SL_r(k[z^-1])``."""
    m = LaurentMatrix.identity(r)
    for _ in range(factors):
        m = m @ random_elementary(rng, r, -1, degree)
    return m


def series_unit_diag(r: int, high: int) -> LaurentMatrix:
    """``diag(1/(1 - z), 1 - z, 1, ...)`` with the first entry known below ``z^high``."""
    geometric = Laurent.series({k: Fraction(1) for k in range(high)}, 0, high)
    entries = [geometric, Laurent({0: Fraction(1), 1: Fraction(-1)})] + [Laurent.constant(1)] * (r - 2)
    return LaurentMatrix.diag(entries)


def random_dvector(rng: random.Random, r: int, bound: int) -> tuple[int, ...]:
    while True:
        d = sorted(rng.randint(-bound, bound) for _ in range(r - 1))
        last = -sum(d)
        if abs(last) <= bound:
            return tuple(sorted(d + [last]))


def random_loop(rng: random.Random, r: int, max_pole: int = 3, windowed: bool = False,
                ctx: PrecisionContext | None = None) -> LaurentMatrix:
    """Random ``gamma`` in ``SL_r(K)`` of the form ``u z^d h`` with pole bound at most ``max_pole``."""
    ctx = ctx or PrecisionContext()
    while True:
        d = random_dvector(rng, r, 1)
        u = random_sl_negative(rng, r, 1, rng.randint(0, 2))
        h = random_sl_positive(rng, r, 1, rng.randint(0, 2))
        gamma = u @ LaurentMatrix.z_power(d) @ h
        if windowed:
            gamma = gamma @ series_unit_diag(r, ctx.target_high)
        if pole_bound(gamma, ctx) <= max_pole:
            return gamma


def random_big_cell(rng: random.Random, r: int) -> LaurentMatrix:
    """``u h`` with ``u`` in ``SL_r(k[z^-1])`` equal to ``I`` at infinity and ``h`` in ``SL_r(k[z])``."""
    u = LaurentMatrix.identity(r)
    for _ in range(rng.randint(1, 2)):
        i, j = rng.sample(range(r), 2)
        u = u @ LaurentMatrix.elementary(r, i, j, _poly_in(rng, -1, 1, constant=False))
    return u @ random_sl_positive(rng, r, 1, rng.randint(1, 2))


def random_unimodular_polynomial(rng: random.Random, r: int, N: int) -> LaurentMatrix:
    """Matrix over ``k[t]`` with determinant 1 and entries of degree at most ``N``.

    The variable ``t`` is stored as the Laurent variable.
    """
    while True:
        m = LaurentMatrix.identity(r)
        for _ in range(rng.randint(1, 3)):
            m = m @ random_elementary(rng, r, +1, rng.randint(0, N))
        if all(not x.coeffs or max(x.coeffs) <= N for x in m.entries()):
            return m
