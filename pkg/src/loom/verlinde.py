"""Dimensions of level-c conformal blocks for SL_r via the subset-sum formula.

``dim = (r/n)^g * sum_S prod_{s in S, t not in S} |2 sin(pi (s - t) / n)|^(g-1)``
with ``n = r + c`` and ``S`` ranging over r-element subsets of ``[1, n]``.
Two backends evaluate it: certified intervals snapped to an integer, and
exact arithmetic in the cyclotomic field of conductor ``4n``.  An
independent sum over dominant weights serves as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .arith import (
    MAX_PREC_BITS,
    Cyclotomic,
    Interval,
    default_precision,
    sin2_exact,
    sin2_interval,
    snap_integer,
)
from .errors import AmbiguousSnap, DegreeOutOfRange, InvalidInput, InvalidWeight, UnsupportedRange

MAX_N = 16
MAX_GENUS = 8
SNAP_TOL = Fraction(1, 10**6)


@dataclass(frozen=True)
class VerlindeQuery:
    r: int
    c: int
    g: int

    def __post_init__(self):
        if self.r < 2 or self.c < 0 or self.g < 0:
            raise InvalidInput("need rank r >= 2, level c >= 0, genus g >= 0")
        if self.r + self.c > MAX_N or self.g > MAX_GENUS:
            raise UnsupportedRange(f"supported range is r + c <= {MAX_N}, g <= {MAX_GENUS}")

    @property
    def n(self) -> int:
        return self.r + self.c


def subsets_colex(n: int, r: int) -> list[tuple[int, ...]]:
    """r-element subsets of [1, n] in colexicographic order, each listed decreasing."""
    subs = [tuple(sorted(s, reverse=True)) for s in combinations(range(1, n + 1), r)]
    subs.sort(key=lambda s: s)  # decreasing tuples compare colexicographically
    return subs


def _gap_multiset(S: Sequence[int], n: int) -> dict[int, int]:
    members = set(S)
    counts: dict[int, int] = {}
    for s in S:
        for t in range(1, n + 1):
            if t not in members:
                k = abs(s - t)
                counts[k] = counts.get(k, 0) + 1
    return counts


def _term_interval(S: Sequence[int], n: int, g: int, prec: int, sines: dict[int, Interval]) -> Interval:
    prod = Interval.from_rational(1, prec)
    for k, mult in sorted(_gap_multiset(S, n).items()):
        prod = prod * sines[k] ** mult
    return prod ** (g - 1)


def _sines(n: int, prec: int) -> dict[int, Interval]:
    return {k: sin2_interval(k, n, prec) for k in range(1, n)}


def verlinde_terms(q: VerlindeQuery, prec: int | None = None) -> list[tuple[tuple[int, ...], Interval]]:
    prec = prec or default_precision()
    sines = _sines(q.n, prec)
    return [(S, _term_interval(S, q.n, q.g, prec, sines)) for S in subsets_colex(q.n, q.r)]


def _interval_value(q: VerlindeQuery, prec: int) -> Interval:
    total = Interval.from_rational(0, prec)
    for _, term in verlinde_terms(q, prec):
        total = total + term
    return Interval.from_rational(Fraction(q.r, q.n) ** q.g, prec) * total


def _snap_with_retry(evaluate, tol=SNAP_TOL) -> int:
    prec = default_precision()
    while True:
        try:
            return snap_integer(evaluate(prec), tol)
        except AmbiguousSnap:
            if prec * 2 > MAX_PREC_BITS:
                raise
            prec *= 2


@lru_cache(maxsize=None)
def _sine_powers_exact(n: int):
    return {k: sin2_exact(k, n) for k in range(1, n)}


def _exact_value(q: VerlindeQuery) -> int:
    n = q.n
    sines = _sine_powers_exact(n)
    conductor = 4 * n
    total = Cyclotomic.from_rational(0, conductor)
    cache: dict[tuple, Cyclotomic] = {}
    for S in subsets_colex(n, q.r):
        key = tuple(sorted(_gap_multiset(S, n).items()))
        term = cache.get(key)
        if term is None:
            prod = Cyclotomic.from_rational(1, conductor)
            for k, mult in key:
                prod = prod * sines[k] ** mult
            term = prod ** (q.g - 1)
            cache[key] = term
        total = total + term
    value = total * Fraction(q.r, n) ** q.g
    if not value.is_rational():
        raise AmbiguousSnap("exact evaluation did not land in the rationals")
    rational = value.to_rational()
    if rational.denominator != 1:
        raise AmbiguousSnap(f"exact evaluation gave the non-integer {rational}")
    return rational.numerator


def verlinde_number(q: VerlindeQuery, backend: str = "interval") -> int:
    if backend == "interval":
        return _snap_with_retry(lambda prec: _interval_value(q, prec))
    if backend == "exact":
        return _exact_value(q)
    raise InvalidInput(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# weights


def _check_weight(parts: Sequence[int], r: int, c: int) -> tuple[int, ...]:
    parts = tuple(int(x) for x in parts)
    if len(parts) != r - 1:
        raise InvalidWeight(f"a weight for rank {r} has {r - 1} parts, got {len(parts)}")
    if any(x < 0 for x in parts) or any(a < b for a, b in zip(parts, parts[1:])):
        raise InvalidWeight(f"parts must be nonincreasing and nonnegative: {parts}")
    if parts and parts[0] > c:
        raise InvalidWeight(f"first part {parts[0]} exceeds the level {c}")
    return parts


def weight_to_subset(parts: Sequence[int], r: int, c: int) -> tuple[int, ...]:
    """``s_i = lambda_i + r - i + 1`` with ``lambda_r = 0``; decreasing."""
    lam = _check_weight(parts, r, c) + (0,)
    return tuple(lam[i - 1] + r - i + 1 for i in range(1, r + 1))


def weight_for_degree(r: int, c: int, d: int) -> tuple[int, ...]:
    """Parts of ``c`` times the ``(r - d)``-th fundamental weight."""
    if not 0 < d < r:
        raise DegreeOutOfRange(f"need 0 < d < r, got d = {d}, r = {r}")
    return tuple(c if i < r - d else 0 for i in range(r - 1))


def level_weights(r: int, c: int) -> list[tuple[int, ...]]:
    """All nonincreasing ``(lambda_1, ..., lambda_{r-1})`` with ``c >= lambda_1`` and ``lambda_{r-1} >= 0``."""
    out = []

    def rec(prefix, cap, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        for x in range(cap, -1, -1):
            rec(prefix + [x], x, left - 1)

    rec([], c, r - 1)
    return out


# ---------------------------------------------------------------------------
# weight-sum cross-check


def _oracle_interval(q: VerlindeQuery, prec: int) -> Interval:
    n = q.n
    sines = _sines(n, prec)
    total = Interval.from_rational(0, prec)
    for lam in level_weights(q.r, q.c):
        s = weight_to_subset(lam, q.r, q.c)
        prod = Interval.from_rational(1, prec)
        for i in range(q.r):
            for j in range(i + 1, q.r):
                prod = prod * sines[s[i] - s[j]]
        total = total + prod ** (2 - 2 * q.g)
    scale = Fraction(q.r * n ** (q.r - 1)) ** (q.g - 1)
    return total * Interval.from_rational(scale, prec)


_NORMALIZATION_ANCHORS = {(2, 1, 2): 4, (2, 2, 2): 10}


@lru_cache(maxsize=1)
def _validated_normalization() -> bool:
    for (r, c, g), expected in _NORMALIZATION_ANCHORS.items():
        q = VerlindeQuery(r, c, g)
        got = _snap_with_retry(lambda prec: _oracle_interval(q, prec))
        if got != expected:
            raise AssertionError(f"weight-sum normalization fails at {(r, c, g)}: {got} != {expected}")
    return True


def smatrix_oracle(q: VerlindeQuery) -> int:
    """Weight-sum form of the same count; its normalization is checked against two anchors first."""
    _validated_normalization()
    return _snap_with_retry(lambda prec: _oracle_interval(q, prec))


def rotate_subset(S: Sequence[int], n: int, by: int = 1) -> tuple[int, ...]:
    return tuple(sorted((((s - 1 + by) % n) + 1 for s in S), reverse=True))
