"""Exact rationals, exact cyclotomic numbers, and certified intervals.

Rationals are :class:`fractions.Fraction`; this module only adds the
``"p/q"`` wire format.  :class:`Cyclotomic` stores an element of
``Q(zeta_N)`` in the power basis of a primitive ``N``-th root of unity,
reduced modulo the ``N``-th cyclotomic polynomial.  :class:`Interval` is a
closed real interval with outward (directed) rounding at a fixed binary
precision, built on the interval kernel of ``mpmath.libmp``.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

import mpmath
from mpmath import libmp
from mpmath.libmp import libmpi

from .errors import AmbiguousSnap, InvalidInput

Rational = Fraction

DEFAULT_PREC_BITS = 128
MAX_PREC_BITS = 1024


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into a reduced Fraction."""
    if isinstance(text, bool):
        raise InvalidInput(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(f"not a rational: {text!r}")
    try:
        num, sep, den = text.strip().partition("/")
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational: {text!r}") from exc
    return value


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def default_precision() -> int:
    """Interval precision in bits; ``LOOM_PREC_BITS`` overrides the default."""
    raw = os.environ.get("LOOM_PREC_BITS")
    if not raw:
        return DEFAULT_PREC_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"LOOM_PREC_BITS must be an integer, got {raw!r}") from exc
    if bits < 16:
        raise InvalidInput("LOOM_PREC_BITS must be at least 16")
    return bits


# ---------------------------------------------------------------------------
# cyclotomic fields


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c, rem = divmod(num[k + len(den) - 1], lead)
        assert rem == 0
        out[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    assert not any(num[: len(den) - 1])
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise InvalidInput("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv_lead
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                a[k + j] -= c * bj
    return _trim(q), _trim(a[: len(b) - 1])


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


class Cyclotomic:
    """Element of the N-th cyclotomic field, N = ``conductor``.

    ``coords[j]`` is the coefficient of ``zeta**j`` with ``zeta = exp(2 pi i / N)``.
    Elements are only combined with elements of the same conductor; no
    automatic descent to a smaller field is attempted.
    """

    __slots__ = ("conductor", "coords")

    def __init__(self, conductor: int, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != euler_phi(conductor):
            raise InvalidInput(
                f"conductor {conductor} needs {euler_phi(conductor)} coordinates, got {len(coords)}"
            )
        self.conductor = conductor
        self.coords = coords

    @classmethod
    def from_rational(cls, q, conductor: int) -> Cyclotomic:
        phi = euler_phi(conductor)
        return cls(conductor, [Fraction(q)] + [Fraction(0)] * (phi - 1))

    @classmethod
    def zeta_power(cls, conductor: int, k: int) -> Cyclotomic:
        cyc = [Fraction(0)] * conductor
        cyc[k % conductor] = Fraction(1)
        return cls._from_cyclic(conductor, cyc)

    @classmethod
    def _from_cyclic(cls, conductor: int, poly) -> Cyclotomic:
        phi_poly = cyclotomic_polynomial(conductor)
        phi = len(phi_poly) - 1
        p = list(poly)
        for deg in range(len(p) - 1, phi - 1, -1):
            c = p[deg]
            if c:
                shift = deg - phi
                for j, a in enumerate(phi_poly):
                    p[shift + j] -= c * a
        p = p[:phi] + [Fraction(0)] * (phi - len(p))
        obj = cls.__new__(cls)
        obj.conductor = conductor
        obj.coords = tuple(p)
        return obj

    def _coerce(self, other) -> Cyclotomic:
        if isinstance(other, Cyclotomic):
            if other.conductor != self.conductor:
                raise InvalidInput(
                    f"conductor mismatch: {self.conductor} vs {other.conductor}"
                )
            return other
        if isinstance(other, (int, _RationalABC)):
            return Cyclotomic.from_rational(other, self.conductor)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.conductor, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.conductor, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = self.conductor
        cyc = [Fraction(0)] * n
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        cyc[(i + j) % n] += a * b
        return Cyclotomic._from_cyclic(n, cyc)

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        a = _trim(list(self.coords))
        if not a:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        m = [Fraction(c) for c in cyclotomic_polynomial(self.conductor)]
        # extended Euclid: track s with s*a == r (mod m)
        r0, r1 = m, a
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
            if not r1:
                raise ZeroDivisionError("element is not invertible")
        c = r1[0]
        inv = [x / c for x in s1]
        cyc = [Fraction(0)] * max(self.conductor, len(inv))
        for j, x in enumerate(inv):
            cyc[j % self.conductor] += x
        return Cyclotomic._from_cyclic(self.conductor, cyc[: self.conductor])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.from_rational(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> Cyclotomic:
        n = self.conductor
        cyc = [Fraction(0)] * n
        for j, a in enumerate(self.coords):
            cyc[(-j) % n] += a
        return Cyclotomic._from_cyclic(n, cyc)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def to_interval(self, prec: int | None = None) -> Interval:
        """Certified enclosure of a real element."""
        if not self.is_real():
            raise ValueError("only real cyclotomic elements have an interval hull")
        prec = prec or default_precision()
        total = Interval.from_rational(self.coords[0], prec)
        for j, a in enumerate(self.coords[1:], start=1):
            if a:
                total = total + Interval.from_rational(a, prec) * cos_2pi_fraction(j, self.conductor, prec)
        return total

    def __eq__(self, other):
        if isinstance(other, (int, _RationalABC)):
            return self.is_rational() and self.coords[0] == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.conductor == other.conductor and self.coords == other.coords

    def __hash__(self):
        return hash((self.conductor, self.coords))

    def __repr__(self):
        terms = [f"{format_rational(a)}*z^{j}" for j, a in enumerate(self.coords) if a]
        return f"Cyclotomic({self.conductor}: {' + '.join(terms) or '0'})"


def sin2_exact(k: int, n: int) -> Cyclotomic:
    """Exact ``2 sin(pi k / n)`` in the field of conductor ``4 n``.

    Uses ``2 sin(x) = -i (e^{ix} - e^{-ix})`` with ``-i = zeta^{3n}`` and
    ``e^{i pi k / n} = zeta^{2k}`` for ``zeta`` a primitive ``4n``-th root.
    """
    if n < 1:
        raise InvalidInput("n must be positive")
    big = 4 * n
    return Cyclotomic.zeta_power(big, 3 * n + 2 * k) - Cyclotomic.zeta_power(big, 3 * n - 2 * k)


# ---------------------------------------------------------------------------
# intervals


def _to_mpf(raw):
    return mpmath.mpf(raw)


class Interval:
    """Closed interval ``[lo, hi]`` with outward rounding at ``precision_bits``."""

    __slots__ = ("_raw", "precision_bits")

    def __init__(self, lo, hi=None, precision_bits: int | None = None):
        prec = precision_bits or default_precision()
        hi = lo if hi is None else hi
        a = _endpoint(lo, prec, "f")
        b = _endpoint(hi, prec, "c")
        if libmp.mpf_gt(a, b):
            raise InvalidInput("interval with lo > hi")
        self._raw = (a, b)
        self.precision_bits = prec

    @classmethod
    def _wrap(cls, raw, prec) -> Interval:
        obj = cls.__new__(cls)
        obj._raw = raw
        obj.precision_bits = prec
        return obj

    @classmethod
    def from_rational(cls, q, prec: int | None = None) -> Interval:
        q = Fraction(q)
        return cls(q, q, prec)

    @property
    def lo(self) -> mpmath.mpf:
        return _to_mpf(self._raw[0])

    @property
    def hi(self) -> mpmath.mpf:
        return _to_mpf(self._raw[1])

    def lo_exact(self) -> Fraction:
        return Fraction(*libmp.to_rational(self._raw[0]))

    def hi_exact(self) -> Fraction:
        return Fraction(*libmp.to_rational(self._raw[1]))

    def contains(self, q) -> bool:
        if isinstance(q, float):
            q = Fraction(q)
        q = Fraction(q)
        return self.lo_exact() <= q <= self.hi_exact()

    def width(self) -> Fraction:
        return self.hi_exact() - self.lo_exact()

    def _other(self, other):
        if isinstance(other, Interval):
            return other._raw, max(self.precision_bits, other.precision_bits)
        if isinstance(other, (int, _RationalABC)):
            return Interval.from_rational(other, self.precision_bits)._raw, self.precision_bits
        return None, None

    def __add__(self, other):
        raw, prec = self._other(other)
        if raw is None:
            return NotImplemented
        return Interval._wrap(libmpi.mpi_add(self._raw, raw, prec), prec)

    __radd__ = __add__

    def __sub__(self, other):
        raw, prec = self._other(other)
        if raw is None:
            return NotImplemented
        return Interval._wrap(libmpi.mpi_sub(self._raw, raw, prec), prec)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Interval._wrap(libmpi.mpi_neg(self._raw), self.precision_bits)

    def __mul__(self, other):
        raw, prec = self._other(other)
        if raw is None:
            return NotImplemented
        return Interval._wrap(libmpi.mpi_mul(self._raw, raw, prec), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        raw, prec = self._other(other)
        if raw is None:
            return NotImplemented
        if libmp.mpf_le(raw[0], libmp.fzero) and libmp.mpf_ge(raw[1], libmp.fzero):
            raise ZeroDivisionError("divisor interval contains zero")
        return Interval._wrap(libmpi.mpi_div(self._raw, raw, prec), prec)

    def __rtruediv__(self, other):
        return Interval.from_rational(other, self.precision_bits) / self

    def __abs__(self):
        return Interval._wrap(libmpi.mpi_abs(self._raw, self.precision_bits), self.precision_bits)

    def __pow__(self, k: int):
        if k < 0:
            return 1 / (self ** (-k))
        if k == 0:
            return Interval.from_rational(1, self.precision_bits)
        return Interval._wrap(libmpi.mpi_pow_int(self._raw, k, self.precision_bits), self.precision_bits)

    def __repr__(self):
        return f"Interval([{mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)}], prec={self.precision_bits})"


def _endpoint(x, prec, rnd):
    if isinstance(x, mpmath.mpf):
        return libmp.mpf_pos(x._mpf_, prec, rnd)
    if isinstance(x, float):
        return libmp.from_float(x, prec, rnd)
    q = Fraction(x)
    return libmp.from_rational(q.numerator, q.denominator, prec, rnd)


def _pi_fraction(num: int, den: int, prec: int):
    pi = libmpi.mpi_pi(prec)
    scaled = libmpi.mpi_mul(pi, (libmp.from_int(num), libmp.from_int(num)), prec)
    return libmpi.mpi_div(scaled, (libmp.from_int(den), libmp.from_int(den)), prec)


def sin2_interval(k: int, n: int, prec: int | None = None) -> Interval:
    """Certified enclosure of ``2 sin(pi k / n)``."""
    prec = prec or default_precision()
    s = libmpi.mpi_sin(_pi_fraction(k, n, prec), prec)
    return Interval._wrap(libmpi.mpi_mul(s, (libmp.from_int(2), libmp.from_int(2)), prec), prec)


def cos_2pi_fraction(j: int, n: int, prec: int | None = None) -> Interval:
    """Certified enclosure of ``cos(2 pi j / n)``."""
    prec = prec or default_precision()
    return Interval._wrap(libmpi.mpi_cos(_pi_fraction(2 * j, n, prec), prec), prec)


def snap_integer(x: Interval, tol) -> int:
    """The unique integer ``m`` with both endpoints of ``x`` within ``tol`` of ``m``."""
    tol = Fraction(tol)
    if tol <= 0:
        raise InvalidInput("tolerance must be positive")
    lo, hi = x.lo_exact(), x.hi_exact()
    candidates = [
        m
        for m in range(math.floor(hi - tol), math.ceil(lo + tol) + 1)
        if abs(lo - m) <= tol and abs(hi - m) <= tol
    ]
    if len(candidates) != 1:
        raise AmbiguousSnap(
            f"interval {x!r} does not pin a unique integer at tolerance {format_rational(tol)}"
        )
    return candidates[0]
