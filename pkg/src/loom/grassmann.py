"""Lattices in K^r, their invariant factors, and Birkhoff factorization.

A matrix ``M`` over ``K = k((z))`` generates the lattice ``W = M O^r`` with
``O = k[[z]]``.  Its d-vector lists the exponents of the elementary divisors
of ``W`` relative to ``O^r``.  Birkhoff factorization writes an element of
``SL_r(K)`` as ``gamma_minus @ z**d @ gamma_plus`` with ``gamma_minus`` a
polynomial matrix in ``z**-1`` and ``gamma_plus`` a matrix over ``O``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from . import linalg
from .errors import (
    DegreeTooHigh,
    IndeterminateOrder,
    InvalidInput,
    LengthMismatch,
    NotInBigCell,
    NotSpecial,
    PrecisionExhausted,
    SumMismatch,
)
from .laurent import (
    DEFAULT_CONTEXT,
    Laurent,
    LaurentMatrix,
    PrecisionContext,
    mat_det,
    mat_inverse,
    pole_bound,
)


@dataclass(frozen=True)
class DVector:
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InvalidInput("a d-vector needs at least one entry")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise InvalidInput(f"d-vector must be weakly increasing: {vals}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def total(self) -> int:
        return sum(self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def to_json(self) -> dict:
        return {"d": list(self.values)}


@dataclass(frozen=True)
class Lattice:
    """The lattice spanned by the columns of ``generators`` over ``k[[z]]``."""

    generators: LaurentMatrix
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def rank(self) -> int:
        return self.generators.rank

    def dvector(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> DVector:
        hit = self._cache.get("d")
        if hit is None:
            hit = self._cache.setdefault("d", _lattice_dvector(self.generators, ctx))
        return hit


@dataclass(frozen=True)
class BirkhoffFactorization:
    gamma_minus: LaurentMatrix
    d: DVector
    gamma_plus: LaurentMatrix

    def product(self) -> LaurentMatrix:
        return self.gamma_minus @ LaurentMatrix.z_power(self.d.values) @ self.gamma_plus

    def to_json(self) -> dict:
        return {
            "gamma_minus": self.gamma_minus.to_json(),
            "d": list(self.d.values),
            "gamma_plus": self.gamma_plus.to_json(),
        }


def _as_matrix(L) -> LaurentMatrix:
    return L.generators if isinstance(L, Lattice) else L


# ---------------------------------------------------------------------------
# Smith reduction over k[[z]] modulo z^H


def _valuation(poly: list[Fraction]) -> int:
    for k, c in enumerate(poly):
        if c:
            return k
    return len(poly)


def _series_inverse_list(u: list[Fraction], n: int) -> list[Fraction]:
    inv0 = 1 / u[0]
    h = [inv0]
    for k in range(1, n):
        s = sum((u[j] * h[k - j] for j in range(1, min(k, len(u) - 1) + 1) if u[j]), Fraction(0))
        h.append(-s * inv0)
    return h


def smith_exponents(P: list[list[list[Fraction]]], H: int) -> list[int]:
    """Elementary divisor exponents of a matrix over ``k[[z]]/z^H``.

    ``P[i][j]`` lists the coefficients of ``z^0 .. z^(H-1)``.  Pivots are
    chosen by minimal valuation, ties going to the smallest (row, column).
    Raises :class:`PrecisionExhausted` if some divisor is not visible below
    ``z^H``.
    """
    m = [[list(x) for x in row] for row in P]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    active_r = list(range(rows))
    active_c = list(range(cols))
    out = []
    while active_r and active_c:
        best = None
        for i in active_r:
            for j in active_c:
                v = _valuation(m[i][j])
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, pi, pj = best
        if v >= H:
            raise PrecisionExhausted(
                f"{len(active_r)} elementary divisor(s) are not visible below z^{H}"
            )
        out.append(v)
        pivot = m[pi][pj]
        inv = _series_inverse_list(pivot[v:], H - v)
        for i in active_r:
            if i == pi:
                continue
            a = m[i][pj]
            va = _valuation(a)
            if va >= H:
                continue
            # q = a / pivot as a power series, known mod z^(H - v)
            shifted = a[v:]
            q = [Fraction(0)] * (H - v)
            for s_idx, s in enumerate(shifted):
                if s:
                    for t_idx in range(H - v - s_idx):
                        if inv[t_idx]:
                            q[s_idx + t_idx] += s * inv[t_idx]
            row_i, row_p = m[i], m[pi]
            for j in active_c:
                src = row_p[j]
                dst = row_i[j]
                for a_idx, qa in enumerate(q):
                    if qa:
                        for b_idx in range(H - a_idx):
                            if src[b_idx]:
                                dst[a_idx + b_idx] -= qa * src[b_idx]
        active_r.remove(pi)
        active_c.remove(pj)
    return sorted(out)


def _coefficient_grid(M: LaurentMatrix, H: int) -> list[list[list[Fraction]]]:
    return [[[x[k] for k in range(H)] for x in row] for row in M.rows]


def _lattice_dvector(M: LaurentMatrix, ctx: PrecisionContext) -> DVector:
    r = M.rank
    try:
        s = M.pole_order()
        n = mat_det(M).order()
    except IndeterminateOrder as exc:
        raise PrecisionExhausted(str(exc)) from exc
    P = M.shift(s)
    if P.exact:
        H = r * s + n + 1
    else:
        H = int(P.prec)
    if H <= 0:
        raise PrecisionExhausted("no coefficients of the cleared matrix are known")
    e = smith_exponents(_coefficient_grid(P, H), H)
    d = [x - s for x in e]
    if sum(d) != n:
        raise PrecisionExhausted(
            f"elementary divisors sum to {sum(d)} but the determinant has order {n}"
        )
    return DVector(tuple(d))


def lattice_dvector(L, ctx: PrecisionContext = DEFAULT_CONTEXT) -> DVector:
    if isinstance(L, Lattice):
        return L.dvector(ctx)
    return _lattice_dvector(L, ctx)


def is_special(L) -> bool:
    return mat_det(_as_matrix(L)).order() == 0


def qN_level(L, ctx: PrecisionContext = DEFAULT_CONTEXT) -> int:
    d = lattice_dvector(L, ctx)
    return max(abs(d[0]), abs(d[-1]))


def dominance_leq(d: DVector | Sequence[int], dprime: DVector | Sequence[int]) -> bool:
    """True when the orbit of ``z**dprime`` lies in the closure of the orbit of ``z**d``."""
    d = d if isinstance(d, DVector) else DVector(tuple(d))
    dprime = dprime if isinstance(dprime, DVector) else DVector(tuple(dprime))
    if len(d) != len(dprime):
        raise LengthMismatch(f"lengths differ: {len(d)} vs {len(dprime)}")
    if d.total != dprime.total:
        raise SumMismatch(f"sums differ: {d.total} vs {dprime.total}")
    a = b = 0
    for x, y in zip(d, dprime):
        a += x
        b += y
        if b < a:
            return False
    return True


def dense_orbit_dvector(r: int, N: int) -> DVector:
    if r < 1 or N < 0:
        raise InvalidInput("need r >= 1 and N >= 0")
    vals = []
    for i in range(1, r + 1):
        if 2 * i < r + 1:
            vals.append(-N)
        elif 2 * i > r + 1:
            vals.append(N)
        else:
            vals.append(0)
    return DVector(tuple(vals))


def special_dvectors(r: int, N: int) -> list[DVector]:
    """All weakly increasing d with entries in [-N, N] and zero sum."""
    return [
        DVector(c)
        for c in combinations_with_replacement(range(-N, N + 1), r)
        if sum(c) == 0
    ]


def all_dvectors(r: int, N: int) -> list[DVector]:
    return [DVector(c) for c in combinations_with_replacement(range(-N, N + 1), r)]


# ---------------------------------------------------------------------------
# invariant factors at infinity


def infinity_invariant_factors(A: LaurentMatrix, N: int) -> DVector:
    """Elementary divisors of ``z**N A(1/z)`` over ``k[[z]]``.

    ``A`` is a polynomial matrix in ``t`` with determinant 1; its entries are
    stored as Laurent polynomials whose variable stands for ``t``.
    """
    if N < 0:
        raise InvalidInput("N must be nonnegative")
    if not A.exact:
        raise InvalidInput("A must be an exact polynomial matrix")
    for x in A.entries():
        if x.coeffs and min(x.coeffs) < 0:
            raise InvalidInput("A must be polynomial in t")
        if x.coeffs and max(x.coeffs) > N:
            raise DegreeTooHigh(f"entry of degree {max(x.coeffs)} exceeds N = {N}")
    if mat_det(A) != Laurent.constant(1):
        raise NotSpecial("det A(t) must equal 1")
    r = A.rank
    B = A.map(lambda x: Laurent({N - e: c for e, c in x.coeffs.items()}))
    H = r * N + 1
    e = smith_exponents(_coefficient_grid(B, H), H)
    if sum(e) != r * N:
        raise PrecisionExhausted("invariant factors failed the determinant check")
    return DVector(tuple(e))


# ---------------------------------------------------------------------------
# Birkhoff factorization


def _require_special(gamma: LaurentMatrix) -> None:
    det = mat_det(gamma)
    if not det.agrees_with(Laurent.constant(1)):
        raise NotSpecial("det gamma must be 1")
    if not det.exact and det.high <= 0:
        raise PrecisionExhausted("determinant is not known to constant order")


def _inverse_for_birkhoff(gamma: LaurentMatrix, ctx: PrecisionContext):
    N = pole_bound(gamma, ctx)
    inv = mat_inverse(gamma, ctx.with_target(max(ctx.target_high, N + 1)))
    return N, inv


def _coeff_block(M: LaurentMatrix, e: int, needed: str) -> list[list[Fraction]]:
    try:
        return M.coefficient(e)
    except PrecisionExhausted as exc:
        raise PrecisionExhausted(f"{needed}: {exc}") from exc


def _check_factorization(gamma: LaurentMatrix, F: BirkhoffFactorization) -> None:
    gp = F.gamma_plus
    for x in gp.entries():
        if x.valuation_bound() < 0 and any(e < 0 for e in x.coeffs):
            raise PrecisionExhausted("gamma_plus acquired a pole; window too small")
        if not x.exact and x.high < 0:
            raise PrecisionExhausted("gamma_plus is not known to constant order")
    if mat_det(F.gamma_minus) != Laurent.constant(1):
        raise PrecisionExhausted("gamma_minus does not have determinant 1")
    if not mat_det(gp).agrees_with(Laurent.constant(1)):
        raise PrecisionExhausted("gamma_plus does not have determinant 1")
    if not F.product().agrees_with(gamma):
        raise PrecisionExhausted("factor product does not reproduce the input on its window")


def birkhoff_big_cell(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BirkhoffFactorization:
    """Factor ``gamma = gamma_minus @ gamma_plus`` with ``gamma_minus(inf) = I``.

    Solves for ``X = gamma_minus**-1 = I + X_1/z + ... + X_N/z^N`` from the
    requirement that ``X @ gamma`` has no negative powers of ``z``.
    """
    _require_special(gamma)
    r = gamma.rank
    N, _ = _inverse_for_birkhoff(gamma, ctx)
    if N == 0:
        I = LaurentMatrix.identity(r)
        F = BirkhoffFactorization(I, DVector((0,) * r), gamma)
        _check_factorization(gamma, F)
        return F
    # gamma coefficients needed for exponents -N .. N-1
    blocks = {e: _coeff_block(gamma, e, "gamma") for e in range(-N, N)}
    zero = [[Fraction(0)] * r for _ in range(r)]
    ms = range(-2 * N, 0)
    X_rows = []
    for i in range(r):
        # unknowns: X_n[i, k] for n = 1..N, k = 0..r-1 -> index (n-1)*r + k
        A_sys, rhs = [], []
        for m in ms:
            g_m = blocks.get(m, zero)
            for j in range(r):
                row = []
                for n in range(1, N + 1):
                    g = blocks.get(m + n, zero)
                    row.extend(g[k][j] for k in range(r))
                A_sys.append(row)
                rhs.append(-g_m[i][j])
        aug = [row + [b] for row, b in zip(A_sys, rhs)]
        red, pivots = linalg.rref(aug)
        nvars = r * N
        if nvars in pivots:
            raise NotInBigCell("no negative-part factor exists: the system is inconsistent")
        if len(pivots) < nvars:
            raise NotInBigCell("the negative-part factor is not unique: gamma lies outside the big cell")
        sol = [Fraction(0)] * nvars
        for row_idx, pc in enumerate(pivots):
            sol[pc] = red[row_idx][nvars]
        X_rows.append(sol)
    X = LaurentMatrix([
        [
            Laurent({0: Fraction(int(i == k)), **{-n: X_rows[i][(n - 1) * r + k] for n in range(1, N + 1)}})
            for k in range(r)
        ]
        for i in range(r)
    ])
    if mat_det(X) != Laurent.constant(1):
        raise NotInBigCell("candidate negative factor is not unimodular")
    gamma_minus = mat_inverse(X, ctx)
    gamma_plus = X @ gamma
    F = BirkhoffFactorization(gamma_minus, DVector((0,) * r), gamma_plus)
    _check_factorization(gamma, F)
    return F


def _vector_poly(vec: list[Fraction], r: int, lo: int, hi: int) -> list[Laurent]:
    """Unpack coefficient vector (exponent-major over [lo, hi]) into r Laurent polynomials."""
    comps: list[dict[int, Fraction]] = [dict() for _ in range(r)]
    for idx, c in enumerate(vec):
        if c:
            e = lo + idx // r
            comps[idx % r][e] = c
    return [Laurent(c) for c in comps]


def birkhoff_full(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> BirkhoffFactorization:
    """Factor ``gamma = gamma_minus @ z**d @ gamma_plus`` with ascending ``d``.

    The columns of ``gamma_minus`` are found by walking the filtration
    ``Lambda_n = W ∩ z^n k[z^-1]^r`` of ``W = gamma O^r`` upward in ``n``:
    whatever ``Lambda_n`` contains beyond ``Lambda_(n-1) + z Lambda_(n-1)``
    contributes new columns ``z^-n v`` with ``d_j = n``.
    """
    _require_special(gamma)
    r = gamma.rank
    N, ginv = _inverse_for_birkhoff(gamma, ctx)
    if N == 0:
        F = BirkhoffFactorization(LaurentMatrix.identity(r), DVector((0,) * r), gamma)
        _check_factorization(gamma, F)
        return F
    inv_blocks = {e: _coeff_block(ginv, e, "gamma inverse") for e in range(-N, N)}
    found: list[tuple[int, list[Laurent]]] = []
    for n in range(-N, (r - 1) * N + 1):
        lo = -N
        width = n - lo + 1
        nvars = r * width
        # v = sum_e v_e z^e for e in [lo, n]; require coefficient of z^m in ginv @ v to vanish for m < 0
        system = []
        for m in range(-2 * N, 0):
            for i in range(r):
                row = [Fraction(0)] * nvars
                for e_idx in range(width):
                    g = inv_blocks.get(m - (lo + e_idx))
                    if g is None:
                        continue
                    for k in range(r):
                        row[e_idx * r + k] = g[i][k]
                system.append(row)
        basis = linalg.nullspace(system, nvars)
        if len(basis) == sum(max(n - dj + 1, 0) for dj, _ in found):
            continue
        old = []
        for dj, w in found:
            for mexp in range(dj, n + 1):
                old.append(_pack(w, mexp, r, lo, n))
        rank_now = linalg.rank(old) if old else 0
        span = list(old)
        for vec in basis:
            trial = span + [vec]
            rk = linalg.rank(trial)
            if rk > rank_now:
                span = trial
                rank_now = rk
                comps = _vector_poly(vec, r, lo, n)
                found.append((n, [c.shift(-n) for c in comps]))
        if len(found) >= r:
            break
    if len(found) != r:
        raise PrecisionExhausted("filtration did not produce a full basis")
    d = DVector(tuple(dj for dj, _ in found))
    gm = LaurentMatrix([[found[j][1][i] for j in range(r)] for i in range(r)])
    det = mat_det(gm)
    if not det.exact or len(det.coeffs) != 1 or 0 not in det.coeffs:
        raise PrecisionExhausted("negative factor does not have constant determinant")
    c = det.coeffs[0]
    gm = LaurentMatrix([[x.scale(1 / c) if j == 0 else x for j, x in enumerate(row)] for row in gm.rows])
    gp = LaurentMatrix.z_power([-x for x in d.values]) @ mat_inverse(gm, ctx) @ gamma
    F = BirkhoffFactorization(gm, d, gp)
    _check_factorization(gamma, F)
    return F


def _pack(w: list[Laurent], shift: int, r: int, lo: int, hi: int) -> list[Fraction]:
    vec = [Fraction(0)] * (r * (hi - lo + 1))
    for k, f in enumerate(w):
        for e, c in f.coeffs.items():
            e2 = e + shift
            if not lo <= e2 <= hi:
                raise PrecisionExhausted("filtration vector left its coefficient range")
            vec[(e2 - lo) * r + k] = c
    return vec


# ---------------------------------------------------------------------------
# the degeneration family


@dataclass(frozen=True)
class DegenerationCheck:
    ok: bool
    d1: int
    d2: int
    entry_21: str
    entry_21_exponent: int
    determinant: str

    def __bool__(self):
        return self.ok


def degeneration_identity_check(d1: int, d2: int) -> DegenerationCheck:
    """Expand the one-parameter family moving ``z^(d1, d2)`` toward ``z^(d1+1, d2-1)``.

    Checks that both outer factors have determinant 1 and no poles in ``z``,
    and that the product is lower triangular with diagonal
    ``(z^(d1+1), z^(d2-1))``.  The (2,1) entry of the product is recorded.
    """
    if not d1 < d2:
        raise InvalidInput("need d1 < d2")
    import sympy

    t, z = sympy.symbols("t z")
    left = sympy.Matrix([[z / t, 1 / t], [-t, 0]])
    mid = sympy.diag(z**d1, z**d2)
    right = sympy.Matrix([[t, -z ** (d2 - d1 - 1) / t], [0, 1 / t]])
    prod = (left * mid * right).applyfunc(sympy.expand)

    def polynomial_in_z(expr) -> bool:
        _, den = sympy.fraction(sympy.together(expr))
        return not den.has(z)

    ok = all(sympy.simplify(m.det() - 1) == 0 for m in (left, right))
    ok = ok and all(polynomial_in_z(x) for m in (left, right) for x in m)
    ok = ok and sympy.simplify(prod[0, 0] - z ** (d1 + 1)) == 0
    ok = ok and sympy.simplify(prod[1, 1] - z ** (d2 - 1)) == 0
    ok = ok and sympy.simplify(prod[0, 1]) == 0
    det = sympy.expand(sympy.simplify(prod.det()))
    ok = ok and sympy.simplify(det - z ** (d1 + d2)) == 0
    e21 = sympy.expand(prod[1, 0])
    base, exponent = sympy.powsimp(sympy.simplify(e21 / (-t**2))).as_base_exp()
    if base == 1:
        exponent = 0
    elif base != z:
        ok = False
    return DegenerationCheck(bool(ok), d1, d2, str(e21), int(exponent), str(det))
