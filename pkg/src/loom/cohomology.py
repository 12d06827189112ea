"""Cohomology of the bundle attached to a loop on the projective line.

The bundle ``E_gamma`` has sections ``a`` in ``k[z^-1]^r`` with
``gamma^-1 a`` in ``k[[z]]^r``.  Its cohomology is the kernel and cokernel of

    k[z^-1]^r  ->  (k((z)) / k[[z]])^r,    a  |->  gamma^-1 a  mod k[[z]]^r

computed on finite truncations that are enlarged until the answer stops
moving.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import NotSpecial, PrecisionExhausted
from .grassmann import DVector, birkhoff_full
from .laurent import DEFAULT_CONTEXT, Laurent, LaurentMatrix, PrecisionContext, mat_det, mat_inverse, pole_bound


@dataclass(frozen=True)
class CohomologyResult:
    h0: int
    h1: int
    euler: int
    stabilized_at: int

    def to_json(self) -> dict:
        return {"h0": self.h0, "h1": self.h1, "euler": self.euler, "stabilized_at": self.stabilized_at}


def _truncated_ranks(ginv: LaurentMatrix, depth_inv: int, D: int, shallow: int) -> tuple[int, int, int]:
    """Columns, rank, and rank of the rows deeper than ``shallow``.

    Sources are ``z^-k e_j`` for ``k <= D``; their images reach depth at most
    ``D + depth_inv``.
    """
    r = ginv.rank
    rows_total = D + depth_inv
    cols = []
    for k in range(D + 1):
        for j in range(r):
            # image of z^-k e_j: coefficient of z^-m in (ginv column j) * z^-k is ginv[., j][k - m]
            col = []
            for m in range(1, rows_total + 1):
                for i in range(r):
                    col.append(ginv.rows[i][j][k - m])
            cols.append(col)
    n_rows = rows_total * r
    A = [[cols[c][row] for c in range(len(cols))] for row in range(n_rows)]
    deep = A[max(shallow, 0) * r:]
    return len(cols), linalg.rank(A), linalg.rank(deep)


def truncated_cohomology(gamma: LaurentMatrix, D: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> tuple[int, int]:
    """``(h0, h1)`` read off with sources of degree at most ``D`` in ``z^-1``."""
    r = gamma.rank
    if D + 1 > ctx.max_high:
        raise PrecisionExhausted(f"truncation degree {D} exceeds the precision cap {ctx.max_high}")
    ginv = mat_inverse(gamma, ctx.with_target(max(ctx.target_high, D + 1)))
    depth_inv = ginv.pole_order()
    # a section whose image stops at depth T has degree at most T + (pole order of gamma)
    shallow = D - gamma.pole_order()
    ncols, rank_all, rank_deep = _truncated_ranks(ginv, depth_inv, D, shallow)
    return ncols - rank_all, r * shallow - (rank_all - rank_deep)


def cohomology_p1(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> CohomologyResult:
    """``h0`` and ``h1`` of ``E_gamma``, enlarging the truncation until two agreements in a row."""
    D = pole_bound(gamma, ctx) + gamma.rank + 2
    previous = None
    streak = 0
    while True:
        current = truncated_cohomology(gamma, D, ctx)
        if current == previous:
            streak += 1
            if streak >= 2:
                h0, h1 = current
                return CohomologyResult(h0, h1, h0 - h1, D)
        else:
            streak = 0
        previous = current
        D += 2


def euler_characteristic(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> int:
    return cohomology_p1(gamma, ctx).euler


@lru_cache(maxsize=1)
def calibrate_epsilon() -> int:
    """Sign ``eps`` with ``E_{z^d} = O(eps d_1) ⊕ ... ⊕ O(eps d_r)``.

    Decided on rank one: whichever of ``z`` and ``z^-1`` gives a bundle with
    two independent sections is ``O(1)``.
    """
    up = cohomology_p1(LaurentMatrix([[Laurent.monomial(1)]])).h0
    down = cohomology_p1(LaurentMatrix([[Laurent.monomial(-1)]])).h0
    if (up, down) == (2, 0):
        return 1
    if (up, down) == (0, 2):
        return -1
    raise AssertionError(f"calibration saw h0(z) = {up}, h0(1/z) = {down}")


def splitting_type(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> DVector:
    """Degrees ``a_1 <= ... <= a_r`` with ``E_gamma = O(a_1) ⊕ ... ⊕ O(a_r)``."""
    d = birkhoff_full(gamma, ctx).d
    eps = calibrate_epsilon()
    return DVector(tuple(sorted(eps * x for x in d)))


def h0_closed_form(d, eps: int | None = None) -> int:
    eps = calibrate_epsilon() if eps is None else eps
    return sum(max(eps * x + 1, 0) for x in d)


@dataclass(frozen=True)
class ThetaCheck:
    ok: bool
    tau: Fraction
    h0_twist: int

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        from .arith import format_rational

        return {"ok": self.ok, "tau": format_rational(self.tau), "h0_twist": self.h0_twist}


def theta_tau_check(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> ThetaCheck:
    """Check that ``tau(gamma)`` vanishes exactly when ``E_gamma(-1)`` has sections."""
    from .extension import tau

    det = mat_det(gamma)
    if not det.agrees_with(Laurent.constant(1)):
        raise NotSpecial("det gamma must be 1")
    eps = calibrate_epsilon()
    twisted = gamma * Laurent.monomial(-eps)
    h0 = cohomology_p1(twisted, ctx).h0
    t = tau(gamma, ctx=ctx)
    return ThetaCheck((t == 0) == (h0 != 0), t, h0)
