"""Truncated Laurent series and square matrices over them.

A :class:`Laurent` value knows its coefficients exactly on a window
``[low, high)``.  Coefficients below ``low`` are zero.  Coefficients at or
above ``high`` are unknown unless the series is ``exact``, in which case it
is a Laurent polynomial and everything outside its support is zero.  Reading
an unknown coefficient raises :class:`PrecisionExhausted`.

Arithmetic tracks absolute precision the usual way for power series: a
product is known up to ``min(v(f) + prec(g), v(g) + prec(f))``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .arith import format_rational, parse_rational
from .errors import (
    EmptyWindow,
    IndeterminateOrder,
    InvalidInput,
    NotAUnit,
    NotInvertible,
    PrecisionExhausted,
    UnsupportedRank,
)

MAX_DET_RANK = 6


@dataclass(frozen=True)
class PrecisionContext:
    target_high: int = 24
    max_high: int = 96

    def __post_init__(self):
        if self.target_high > self.max_high:
            raise InvalidInput("target_high must not exceed max_high")

    def with_target(self, target_high: int) -> PrecisionContext:
        return PrecisionContext(target_high, max(self.max_high, target_high))


DEFAULT_CONTEXT = PrecisionContext()


class Laurent:
    """A Laurent series known exactly on a window of exponents."""

    __slots__ = ("coeffs", "low", "high", "exact")

    def __init__(self, coeffs: dict[int, Fraction] | None = None, low: int | None = None,
                 high: int | None = None, exact: bool = True):
        items = {int(e): Fraction(c) for e, c in (coeffs or {}).items() if c}
        if exact:
            if items:
                low, high = min(items), max(items) + 1
            else:
                low = high = 0 if low is None else low
        else:
            if low is None or high is None:
                raise InvalidInput("a windowed series needs low and high")
            if low > high:
                raise InvalidInput(f"empty window [{low}, {high})")
            for e in items:
                if not low <= e < high:
                    raise InvalidInput(f"coefficient at {e} lies outside window [{low}, {high})")
            nonzero = min(items) if items else high
            low = max(low, nonzero)
        self.coeffs = items
        self.low = low
        self.high = high
        self.exact = exact

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c) -> Laurent:
        return cls({0: Fraction(c)})

    @classmethod
    def monomial(cls, exponent: int, c=1) -> Laurent:
        return cls({exponent: Fraction(c)})

    @classmethod
    def zero(cls) -> Laurent:
        return cls({})

    @classmethod
    def series(cls, coeffs: dict[int, Fraction], low: int, high: int) -> Laurent:
        return cls(coeffs, low, high, exact=False)

    @classmethod
    def big_o(cls, high: int) -> Laurent:
        """``O(z**high)``: zero below ``high``, unknown from there on."""
        return cls({}, high, high, exact=False)

    @classmethod
    def parse(cls, text: str) -> Laurent:
        """Parse an exact Laurent polynomial such as ``"2 - 1/3 z^-1 + z^2"``."""
        return parse_laurent(text)

    # -- access -------------------------------------------------------------

    @property
    def prec(self) -> float | int:
        """Absolute precision: first exponent whose coefficient is unknown."""
        return math.inf if self.exact else self.high

    def __getitem__(self, e: int) -> Fraction:
        if e < self.low:
            return Fraction(0)
        if self.exact or e < self.high:
            return self.coeffs.get(e, Fraction(0))
        raise PrecisionExhausted(f"coefficient of z^{e} is outside the known window [{self.low}, {self.high})")

    coeff = __getitem__

    def is_zero(self) -> bool:
        """True only for the exact zero series."""
        return self.exact and not self.coeffs

    def is_known_zero_below(self, e) -> bool:
        return self.valuation_bound() >= e

    def valuation_bound(self) -> float | int:
        """Exact order when known, otherwise the certified lower bound ``high``."""
        if self.coeffs:
            return min(self.coeffs)
        return math.inf if self.exact else self.high

    def order(self) -> int:
        if self.coeffs:
            return min(self.coeffs)
        if self.exact:
            raise IndeterminateOrder("the zero series has no order")
        raise IndeterminateOrder(f"all coefficients known so far (below z^{self.high}) vanish")

    def degree(self) -> int:
        if not self.exact:
            raise PrecisionExhausted("degree of a truncated series is unknown")
        if not self.coeffs:
            raise IndeterminateOrder("the zero series has no degree")
        return max(self.coeffs)

    def pole_order(self) -> int:
        """Largest ``n >= 0`` with a nonzero coefficient at ``z**-n``."""
        neg = [e for e in self.coeffs if e < 0]
        if neg:
            return -min(neg)
        if self.exact or self.high >= 0 or self.low >= 0:
            return 0
        raise IndeterminateOrder(f"cannot decide the pole order: series known only below z^{self.high}")

    def truncate(self, high: int) -> Laurent:
        """Forget everything at and above ``z**high``."""
        new_high = min(high, self.prec)
        low = min(self.low, new_high)
        return Laurent({e: c for e, c in self.coeffs.items() if e < new_high}, low, new_high, exact=False)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Laurent:
        if isinstance(other, Laurent):
            return other
        if isinstance(other, (int, Fraction)):
            return Laurent.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        if self.exact and other.exact:
            return Laurent(out)
        high = min(self.prec, other.prec)
        low = min(self.low, other.low, high)
        return Laurent({e: c for e, c in out.items() if e < high}, low, high, exact=False)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({e: -c for e, c in self.coeffs.items()}, self.low, self.high, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.exact and other.exact:
            return Laurent(_convolve(self.coeffs, other.coeffs))
        va, vb = self.valuation_bound(), other.valuation_bound()
        if va == math.inf or vb == math.inf:
            return Laurent.zero()
        high = min(va + other.prec, vb + self.prec)
        low = min(self.low + other.low, high)
        prod = _convolve(self.coeffs, other.coeffs, high)
        return Laurent(prod, low, high, exact=False)

    __rmul__ = __mul__

    def scale(self, c) -> Laurent:
        c = Fraction(c)
        if c == 0:
            return Laurent.zero()
        return Laurent({e: c * x for e, x in self.coeffs.items()}, self.low, self.high, self.exact)

    def shift(self, k: int) -> Laurent:
        """Multiply by ``z**k``."""
        return Laurent({e + k: c for e, c in self.coeffs.items()}, self.low + k, self.high + k, self.exact)

    def derivative(self) -> Laurent:
        out = {e - 1: e * c for e, c in self.coeffs.items() if e != 0}
        if self.exact:
            return Laurent(out)
        return Laurent(out, self.low - 1, self.high - 1, exact=False)

    def residue(self) -> Fraction:
        return self[-1]

    def inverse(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Laurent:
        return series_inverse(self, ctx)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return series_inverse(self) ** (-k)
        result = Laurent.constant(1)
        for _ in range(k):
            result = result * self
        return result

    # -- comparison ---------------------------------------------------------

    def agrees_with(self, other, upto: float | int | None = None) -> bool:
        """Equality on the exponents known in both (and below ``upto``)."""
        other = self._coerce(other)
        high = min(self.prec, other.prec)
        if upto is not None:
            high = min(high, upto)
        exps = set(self.coeffs) | set(other.coeffs)
        return all(self[e] == other[e] for e in exps if e < high)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.constant(other)
        if not isinstance(other, Laurent):
            return NotImplemented
        if self.exact != other.exact or self.coeffs != other.coeffs:
            return False
        return self.exact or self.high == other.high

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.exact, None if self.exact else self.high))

    def __repr__(self):
        text = format_laurent(self)
        return f"Laurent({text})"

    def __str__(self):
        return format_laurent(self)

    # -- serialization ------------------------------------------------------

    def terms(self) -> list[dict]:
        return [{"exp": e, "coeff": format_rational(c)} for e, c in sorted(self.coeffs.items())]


TruncatedLaurent = Laurent


def _convolve(a: dict[int, Fraction], b: dict[int, Fraction], high=None) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if high is None or e < high:
                out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


_TERM = re.compile(
    r"""\s*([+-])?\s*
        (?:(\d+(?:/\d+)?)\s*\*?\s*)?
        (z(?:\s*\^\s*\(?\s*(-?\d+)\s*\)?)?)?\s*""",
    re.VERBOSE,
)


def parse_laurent(text: str) -> Laurent:
    text = text.strip()
    if not text:
        raise InvalidInput("empty series")
    pos = 0
    coeffs: dict[int, Fraction] = {}
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not first and m.group(1) is None) or not (m.group(2) or m.group(3)):
            raise InvalidInput(f"cannot parse series {text!r} at position {pos}")
        sign = -1 if m.group(1) == "-" else 1
        c = parse_rational(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            e = int(m.group(4)) if m.group(4) is not None else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, 0) + sign * c
        pos = m.end()
        first = False
    return Laurent(coeffs)


def format_laurent(f: Laurent) -> str:
    parts = []
    for e, c in sorted(f.coeffs.items()):
        mono = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        parts.append(("- " if c < 0 else "+ ") + body)
    text = " ".join(parts).lstrip("+ ") if parts else "0"
    if text.startswith("- "):
        text = "-" + text[2:]
    if not f.exact:
        text += f" + O(z^{f.high})"
    return text


# ---------------------------------------------------------------------------
# series operations


def series_mul(f: Laurent, g: Laurent) -> Laurent:
    for x in (f, g):
        if not x.exact and x.low >= x.high:
            raise EmptyWindow("series with an empty known window")
    out = f * g
    if not out.exact and out.low >= out.high:
        raise EmptyWindow("product has an empty known window")
    return out


def order(f: Laurent) -> int:
    return f.order()


def series_inverse(f: Laurent, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Laurent:
    """Multiplicative inverse, certified on the largest window the input supports.

    Exact monomials invert exactly.  Other exact inputs are expanded up to
    ``ctx.target_high``; truncated inputs up to ``high - 2*order``.
    """
    if not f.coeffs:
        raise NotAUnit("every known coefficient vanishes")
    v = f.order()
    if f.exact and len(f.coeffs) == 1:
        return Laurent({-v: 1 / f.coeffs[v]})
    if f.exact:
        n = max(ctx.target_high + v, 1)
    else:
        n = f.high - v
    if n < 1:
        raise PrecisionExhausted("window too small to invert")
    u = [f.coeffs.get(v + k, Fraction(0)) for k in range(n)]
    inv0 = 1 / u[0]
    h = [inv0]
    support = [k for k in range(1, n) if u[k]]
    for k in range(1, n):
        s = Fraction(0)
        for j in support:
            if j > k:
                break
            s += u[j] * h[k - j]
        h.append(-s * inv0)
    return Laurent({k - v: c for k, c in enumerate(h) if c}, -v, n - v, exact=False)


# ---------------------------------------------------------------------------
# matrices


class LaurentMatrix:
    """Square matrix with :class:`Laurent` entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        built = tuple(tuple(_as_laurent(x) for x in row) for row in rows)
        r = len(built)
        if r == 0 or any(len(row) != r for row in built):
            raise InvalidInput("a LaurentMatrix must be square and nonempty")
        self.rows = built

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, r: int) -> LaurentMatrix:
        return cls([[1 if i == j else 0 for j in range(r)] for i in range(r)])

    @classmethod
    def zero(cls, r: int) -> LaurentMatrix:
        return cls([[0] * r for _ in range(r)])

    @classmethod
    def diag(cls, entries) -> LaurentMatrix:
        entries = list(entries)
        r = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(r)] for i in range(r)])

    @classmethod
    def z_power(cls, d) -> LaurentMatrix:
        """The diagonal matrix ``z**d``."""
        return cls.diag([Laurent.monomial(e) for e in d])

    @classmethod
    def elementary(cls, r: int, i: int, j: int, f) -> LaurentMatrix:
        """``I + f * E_ij`` for ``i != j``."""
        if i == j:
            raise InvalidInput("elementary matrices need i != j")
        m = [[Laurent.constant(1) if a == b else Laurent.zero() for b in range(r)] for a in range(r)]
        m[i][j] = _as_laurent(f)
        return cls(m)

    @classmethod
    def parse(cls, rows) -> LaurentMatrix:
        """Build from nested lists of strings like ``[["2", "z^-1"], ["z", "1"]]``."""
        return cls([[parse_laurent(x) if isinstance(x, str) else x for x in row] for row in rows])

    # -- basic structure ----------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Laurent:
        i, j = ij
        return self.rows[i][j]

    @property
    def exact(self) -> bool:
        return all(x.exact for row in self.rows for x in row)

    @property
    def prec(self) -> float | int:
        return min(x.prec for row in self.rows for x in row)

    def window(self) -> tuple[int, float | int]:
        lows = [x.low for row in self.rows for x in row if not x.is_zero()]
        return (min(lows) if lows else 0), self.prec

    def entries(self) -> Iterable[Laurent]:
        for row in self.rows:
            yield from row

    def map(self, fn) -> LaurentMatrix:
        return LaurentMatrix([[fn(x) for x in row] for row in self.rows])

    def transpose(self) -> LaurentMatrix:
        r = self.rank
        return LaurentMatrix([[self.rows[j][i] for j in range(r)] for i in range(r)])

    def truncate(self, high: int) -> LaurentMatrix:
        return self.map(lambda x: x.truncate(high))

    def derivative(self) -> LaurentMatrix:
        return self.map(Laurent.derivative)

    def shift(self, k: int) -> LaurentMatrix:
        return self.map(lambda x: x.shift(k))

    def trace(self) -> Laurent:
        total = Laurent.zero()
        for i in range(self.rank):
            total = total + self.rows[i][i]
        return total

    def pole_order(self) -> int:
        return max(x.pole_order() for x in self.entries())

    def min_valuation(self) -> float | int:
        return min(x.valuation_bound() for x in self.entries())

    def max_degree(self) -> int:
        """Largest exponent present in an exact matrix (0 for the zero matrix)."""
        if not self.exact:
            raise PrecisionExhausted("degree of a truncated matrix is unknown")
        exps = [e for x in self.entries() for e in x.coeffs]
        return max(exps) if exps else 0

    def constant_term(self) -> list[list[Fraction]]:
        return [[x[0] for x in row] for row in self.rows]

    def coefficient(self, e: int) -> list[list[Fraction]]:
        return [[x[e] for x in row] for row in self.rows]

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: LaurentMatrix):
        if not isinstance(other, LaurentMatrix):
            return False
        if other.rank != self.rank:
            raise InvalidInput(f"rank mismatch: {self.rank} vs {other.rank}")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return LaurentMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return LaurentMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def __matmul__(self, other):
        if not self._check(other):
            return NotImplemented
        r = self.rank
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = Laurent.zero()
                for k in range(r):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LaurentMatrix(out)

    def __mul__(self, other):
        if isinstance(other, LaurentMatrix):
            return self @ other
        if isinstance(other, (Laurent, int, Fraction)):
            return self.map(lambda x: x * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Laurent, int, Fraction)):
            return self.map(lambda x: other * x)
        return NotImplemented

    def scale(self, c) -> LaurentMatrix:
        return self.map(lambda x: x.scale(c))

    def det(self) -> Laurent:
        return mat_det(self)

    def inverse(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> LaurentMatrix:
        return mat_inverse(self, ctx)

    def commutator(self, other: LaurentMatrix) -> LaurentMatrix:
        return self @ other - other @ self

    # -- comparison ---------------------------------------------------------

    def agrees_with(self, other: LaurentMatrix, upto=None) -> bool:
        self._check(other)
        return all(a.agrees_with(b, upto) for a, b in zip(self.entries(), other.entries()))

    def is_identity(self) -> bool:
        return self == LaurentMatrix.identity(self.rank)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"LaurentMatrix[{body}]"

    # -- serialization ------------------------------------------------------

    def with_common_window(self) -> LaurentMatrix:
        """Every entry truncated to the smallest precision among entries."""
        if self.exact:
            return self
        high = self.prec
        return self.map(lambda x: x.truncate(high))

    def to_json(self) -> dict:
        m = self.with_common_window()
        lo, hi = m.window()
        if m.exact:
            exps = [e for x in m.entries() for e in x.coeffs]
            hi = max(exps) + 1 if exps else lo
        return {
            "rank": m.rank,
            "entries": [[x.terms() for x in row] for row in m.rows],
            "window": [lo, hi],
            "exact": m.exact,
        }

    @classmethod
    def from_json(cls, doc: dict) -> LaurentMatrix:
        try:
            r = int(doc["rank"])
            entries = doc["entries"]
            exact = bool(doc.get("exact", True))
            window = doc.get("window")
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed matrix document: {exc}") from exc
        if r < 1 or len(entries) != r or any(len(row) != r for row in entries):
            raise InvalidInput("entries must form an r x r array")
        if not exact and (not isinstance(window, list) or len(window) != 2):
            raise InvalidInput("a truncated matrix needs a [lo, hi] window")
        rows = []
        for row in entries:
            out = []
            for cell in row:
                coeffs: dict[int, Fraction] = {}
                for term in cell:
                    try:
                        e = int(term["exp"])
                    except (KeyError, TypeError, ValueError) as exc:
                        raise InvalidInput(f"malformed term {term!r}") from exc
                    coeffs[e] = coeffs.get(e, 0) + parse_rational(term.get("coeff"))
                if exact:
                    out.append(Laurent(coeffs))
                else:
                    lo, hi = int(window[0]), int(window[1])
                    lo = min([lo] + list(coeffs))
                    out.append(Laurent(coeffs, lo, hi, exact=False))
            rows.append(out)
        return cls(rows)


def _as_laurent(x) -> Laurent:
    if isinstance(x, Laurent):
        return x
    if isinstance(x, (int, Fraction)):
        return Laurent.constant(x)
    if isinstance(x, str):
        return parse_laurent(x)
    raise InvalidInput(f"cannot use {x!r} as a matrix entry")


def mat_det(M: LaurentMatrix) -> Laurent:
    """Determinant by Laplace expansion along rows with memoized minors."""
    if M.rank > MAX_DET_RANK:
        raise UnsupportedRank(f"determinants are supported up to rank {MAX_DET_RANK}")
    return _minor_det(M.rows, 0, tuple(range(M.rank)), {})


def _minor_det(rows, start: int, cols: tuple[int, ...], memo: dict) -> Laurent:
    if not cols:
        return Laurent.constant(1)
    key = (start, cols)
    hit = memo.get(key)
    if hit is not None:
        return hit
    total = Laurent.zero()
    row = rows[start]
    for pos, c in enumerate(cols):
        a = row[c]
        if a.is_zero():
            continue
        sub = _minor_det(rows, start + 1, cols[:pos] + cols[pos + 1:], memo)
        if sub.is_zero():
            continue
        term = a * sub
        total = total - term if pos % 2 else total + term
    memo[key] = total
    return total


def cofactor_matrix(M: LaurentMatrix) -> list[list[Laurent]]:
    """Adjugate entries: ``adj[i][j] = (-1)^(i+j) det(M without row j, column i)``."""
    r = M.rank
    if r > MAX_DET_RANK:
        raise UnsupportedRank(f"determinants are supported up to rank {MAX_DET_RANK}")
    if r == 1:
        return [[Laurent.constant(1)]]
    adj = [[Laurent.zero()] * r for _ in range(r)]
    for j in range(r):
        sub_rows = [M.rows[k] for k in range(r) if k != j]
        memo: dict = {}
        for i in range(r):
            cols = tuple(c for c in range(r) if c != i)
            minor = _minor_det(sub_rows, 0, cols, memo)
            adj[i][j] = -minor if (i + j) % 2 else minor
    return adj


def mat_inverse(M: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> LaurentMatrix:
    """Inverse as adjugate over determinant."""
    d = mat_det(M)
    if d.is_zero():
        raise NotInvertible("determinant is zero")
    if not d.coeffs:
        raise PrecisionExhausted(f"determinant vanishes to the known precision z^{d.high}")
    adj = cofactor_matrix(M)
    vals = [x.valuation_bound() for row in adj for x in row if not x.is_zero()]
    vmin = min(vals) if vals else 0
    inv_ctx = ctx.with_target(ctx.target_high - int(vmin)) if vmin != math.inf else ctx
    try:
        dinv = series_inverse(d, inv_ctx)
    except NotAUnit as exc:
        raise NotInvertible(str(exc)) from exc
    return LaurentMatrix([[x * dinv for x in row] for row in adj])


def pole_bound(M: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> int:
    """Least ``N`` such that ``M`` and ``M**-1`` have poles of order at most ``N``."""
    try:
        return max(M.pole_order(), mat_inverse(M, ctx).pole_order())
    except IndeterminateOrder as exc:
        raise PrecisionExhausted(str(exc)) from exc
