"""Block operators on K^r = V ⊕ O^r, the residue cocycle, and the τ-function.

``V = (z^-1 k[z^-1])^r`` has basis ``z^-n e_i`` (``n >= 1``); a window of depth
``M`` keeps ``n <= M`` and orders the basis as index ``(n - 1) * r + i``.
Vectors of ``V`` are stored as one ``{exponent: coeff}`` dict per component.
Operators are applied to such vectors exactly; matrices only appear when a
finite window is read off at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import (
    InvalidInput,
    NotInStabilizer,
    PrecisionExhausted,
    UnstableTrace,
    WindowTooSmall,
)
from .grassmann import birkhoff_full
from .laurent import DEFAULT_CONTEXT, Laurent, LaurentMatrix, PrecisionContext, mat_det, mat_inverse

Vector = list[dict[int, Fraction]]


@dataclass(frozen=True)
class WindowSpec:
    depth: int
    rank: int

    def __post_init__(self):
        if self.depth < 1 or self.rank < 1:
            raise InvalidInput("window depth and rank must be positive")

    @property
    def size(self) -> int:
        return self.depth * self.rank

    def index(self, n: int, i: int) -> int:
        return (n - 1) * self.rank + i

    def basis(self):
        for n in range(1, self.depth + 1):
            for i in range(self.rank):
                yield n, i

    def grow(self, by: int = 1) -> WindowSpec:
        return WindowSpec(self.depth + by, self.rank)


@dataclass(frozen=True)
class FiniteOperator:
    """``I + matrix`` on the window, identity outside it when ``tail_identity``."""

    window: WindowSpec
    matrix: tuple[tuple[Fraction, ...], ...]
    tail_identity: bool = True

    def __post_init__(self):
        m = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.window.size
        if len(m) != n or any(len(row) != n for row in m):
            raise InvalidInput(f"matrix must be {n} x {n} for this window")

    @classmethod
    def zero(cls, window: WindowSpec) -> FiniteOperator:
        n = window.size
        return cls(window, tuple((Fraction(0),) * n for _ in range(n)))

    @classmethod
    def cell(cls, window: WindowSpec, row: int, col: int, value) -> FiniteOperator:
        n = window.size
        m = [[Fraction(0)] * n for _ in range(n)]
        m[row][col] = Fraction(value)
        return cls(window, tuple(tuple(r) for r in m))


@dataclass(frozen=True)
class BlockDecomp:
    a: list[list[Fraction]]
    b: list[list[Fraction]]
    c: list[list[Fraction]]
    d: list[list[Fraction]]


@dataclass(frozen=True)
class CentralElement:
    alpha: LaurentMatrix
    s: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        if not self.alpha.trace().agrees_with(Laurent.zero()):
            raise InvalidInput("alpha must be traceless")

    def __add__(self, other: CentralElement) -> CentralElement:
        return CentralElement(self.alpha + other.alpha, self.s + other.s)

    def scale(self, c) -> CentralElement:
        return CentralElement(self.alpha.scale(c), self.s * Fraction(c))

    def to_json(self) -> dict:
        from .arith import format_rational

        doc = self.alpha.to_json()
        return {"alpha": doc, "s": format_rational(self.s)}


# ---------------------------------------------------------------------------
# vectors and exact operator application


def _basis_vector(r: int, n: int, i: int) -> Vector:
    v: Vector = [dict() for _ in range(r)]
    v[i][-n] = Fraction(1)
    return v


def _apply(x: LaurentMatrix, vec: Vector, polar_only: bool = True) -> Vector:
    """``x @ vec``, keeping only negative exponents when ``polar_only``."""
    r = x.rank
    out: Vector = [dict() for _ in range(r)]
    for j, comp in enumerate(vec):
        if not comp:
            continue
        deepest = min(comp)
        for i in range(r):
            f = x.rows[i][j]
            if f.is_zero():
                continue
            if polar_only and not f.exact and f.high < -deepest:
                raise WindowTooSmall(
                    f"entry ({i},{j}) is known only below z^{f.high}; need z^{-deepest - 1}"
                )
            target = out[i]
            for k, a in f.coeffs.items():
                for e, c in comp.items():
                    s = k + e
                    if polar_only and s >= 0:
                        continue
                    target[s] = target.get(s, 0) + a * c
    return [{e: c for e, c in comp.items() if c} for comp in out]


def _polar_vec(x: LaurentMatrix, vec: Vector) -> Vector:
    return _apply(x, vec, polar_only=True)


def _window_coords(vec: Vector, w: WindowSpec) -> list[Fraction]:
    out = [Fraction(0)] * w.size
    for i, comp in enumerate(vec):
        for e, c in comp.items():
            if -w.depth <= e <= -1:
                out[w.index(-e, i)] = c
    return out


def _from_coords(coords: Sequence[Fraction], w: WindowSpec) -> Vector:
    vec: Vector = [dict() for _ in range(w.rank)]
    for n, i in w.basis():
        c = coords[w.index(n, i)]
        if c:
            vec[i][-n] = c
    return vec


def _vec_add(a: Vector, b: Vector) -> Vector:
    out = [dict(c) for c in a]
    for i, comp in enumerate(b):
        for e, c in comp.items():
            out[i][e] = out[i].get(e, 0) + c
    return [{e: c for e, c in comp.items() if c} for comp in out]


def _window_matrix(op, w: WindowSpec) -> list[list[Fraction]]:
    """Matrix of ``op`` on the window: column ``k`` holds the image of basis vector ``k``."""
    cols = [_window_coords(op(_basis_vector(w.rank, n, i)), w) for n, i in w.basis()]
    size = w.size
    return [[cols[k][row] for k in range(size)] for row in range(size)]


# ---------------------------------------------------------------------------
# blocks


def block_a(gamma: LaurentMatrix, w: WindowSpec) -> list[list[Fraction]]:
    """Compression of ``gamma`` to the V-window (V-component of images of V-basis vectors)."""
    if gamma.rank != w.rank:
        raise InvalidInput("window rank does not match the matrix")
    return _window_matrix(lambda v: _polar_vec(gamma, v), w)


def block_decomp(gamma: LaurentMatrix, w: WindowSpec) -> BlockDecomp:
    """The four blocks on the V-window and the O-window ``z^0 .. z^(M-1)``."""
    r, M = w.rank, w.depth
    size = w.size
    if gamma.prec < 2 * M:
        raise WindowTooSmall(f"blocks of depth {M} need the matrix known below z^{2 * M}")

    def o_index(n: int, i: int) -> int:
        return n * r + i

    a = block_a(gamma, w)
    b = [[Fraction(0)] * size for _ in range(size)]
    c = [[Fraction(0)] * size for _ in range(size)]
    d = [[Fraction(0)] * size for _ in range(size)]
    for n, i in w.basis():
        img = _apply(gamma, _basis_vector(r, n, i), polar_only=False)
        col = w.index(n, i)
        for k, comp in enumerate(img):
            for e, x in comp.items():
                if 0 <= e < M:
                    c[o_index(e, k)][col] = x
    for n in range(M):
        for i in range(r):
            v: Vector = [dict() for _ in range(r)]
            v[i][n] = Fraction(1)
            img = _apply(gamma, v, polar_only=False)
            col = o_index(n, i)
            for k, comp in enumerate(img):
                for e, x in comp.items():
                    if -M <= e <= -1:
                        b[w.index(-e, k)][col] = x
                    elif 0 <= e < M:
                        d[o_index(e, k)][col] = x
    return BlockDecomp(a, b, c, d)


# ---------------------------------------------------------------------------
# residue and the Tate cocycle


def _require_window(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except WindowTooSmall:
            raise
        except PrecisionExhausted as exc:
            raise WindowTooSmall(str(exc)) from exc

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_require_window
def residue_pairing(alpha: LaurentMatrix, beta: LaurentMatrix) -> Fraction:
    """Coefficient of ``z^-1`` in ``Tr(alpha' beta)``."""
    return (alpha.derivative() @ beta).trace().residue()


def _pole_degree(*ms: LaurentMatrix) -> tuple[int, int]:
    p = max(m.pole_order() for m in ms)
    q = max(max(m.max_degree(), 0) for m in ms)
    return p, q


def default_tate_window(alpha: LaurentMatrix, beta: LaurentMatrix) -> WindowSpec:
    p, q = _pole_degree(alpha, beta)
    r = alpha.rank
    return WindowSpec(r * (p + q) + 2, r)


def _commutator_trace(alpha: LaurentMatrix, beta: LaurentMatrix, bracket: LaurentMatrix, w: WindowSpec) -> Fraction:
    r = w.rank
    total = Fraction(0)
    for n, i in w.basis():
        b = _basis_vector(r, n, i)

        def diag(first: LaurentMatrix, second: LaurentMatrix) -> Fraction:
            inner = _polar_vec(second, b)
            s = Fraction(0)
            for j, comp in enumerate(inner):
                f = first.rows[i][j]
                for e, c in comp.items():
                    s += f[-n - e] * c
            return s

        total += diag(alpha, beta) - diag(beta, alpha) - bracket.rows[i][i][0]
    return total


def tate_cocycle(alpha: LaurentMatrix, beta: LaurentMatrix, w: WindowSpec | None = None) -> Fraction:
    """``Tr([a(alpha), a(beta)] - a([alpha, beta]))`` over a certified window.

    The operator inside the trace vanishes on ``z^-n e_i`` once ``n`` exceeds
    the sum of the degrees of the inputs, so the windowed trace is the true
    trace; the value is recomputed one step deeper as a stability check.
    """
    if not (alpha.exact and beta.exact):
        raise WindowTooSmall("the cocycle needs exact Laurent-polynomial inputs")
    if alpha.rank != beta.rank:
        raise InvalidInput("rank mismatch")
    if w is None:
        w = default_tate_window(alpha, beta)
    bracket = alpha.commutator(beta)
    value = _commutator_trace(alpha, beta, bracket, w)
    again = _commutator_trace(alpha, beta, bracket, w.grow())
    if value != again:
        raise UnstableTrace(f"trace changed from {value} to {again} when the window grew")
    return value


def hat_bracket(x: CentralElement, y: CentralElement) -> CentralElement:
    return CentralElement(x.alpha.commutator(y.alpha), residue_pairing(x.alpha, y.alpha))


@_require_window
def adjoint_action(gamma: LaurentMatrix, x: CentralElement, ctx: PrecisionContext = DEFAULT_CONTEXT) -> CentralElement:
    """``(gamma alpha gamma^-1, s + Res Tr(gamma^-1 gamma' alpha))``."""
    ginv = mat_inverse(gamma, ctx)
    conj = gamma @ x.alpha @ ginv
    correction = (ginv @ gamma.derivative() @ x.alpha).trace().residue()
    return CentralElement(conj, x.s + correction)


# ---------------------------------------------------------------------------
# dual numbers for first-order checks


@dataclass(frozen=True)
class DualMatrix:
    """``value + eps * deriv`` with ``eps**2 = 0``."""

    value: LaurentMatrix
    deriv: LaurentMatrix

    def __matmul__(self, other: DualMatrix) -> DualMatrix:
        return DualMatrix(self.value @ other.value, self.deriv @ other.value + self.value @ other.deriv)

    def derivative(self) -> DualMatrix:
        return DualMatrix(self.value.derivative(), self.deriv.derivative())

    def trace(self) -> DualScalarSeries:
        return DualScalarSeries(self.value.trace(), self.deriv.trace())

    def inverse(self, ctx: PrecisionContext = DEFAULT_CONTEXT) -> DualMatrix:
        vinv = mat_inverse(self.value, ctx)
        return DualMatrix(vinv, -(vinv @ self.deriv @ vinv))


@dataclass(frozen=True)
class DualScalarSeries:
    value: Laurent
    deriv: Laurent

    def residue(self) -> tuple[Fraction, Fraction]:
        return self.value.residue(), self.deriv.residue()


def adjoint_first_order(beta: LaurentMatrix, x: CentralElement, ctx: PrecisionContext = DEFAULT_CONTEXT) -> CentralElement:
    """The ``eps``-coefficient of ``Ad(I + eps beta) x``, computed over dual numbers."""
    r = beta.rank
    gamma = DualMatrix(LaurentMatrix.identity(r), beta)
    alpha = DualMatrix(x.alpha, LaurentMatrix.zero(r))
    ginv = gamma.inverse(ctx)
    conj = gamma @ alpha @ ginv
    _, correction = (ginv @ gamma.derivative() @ alpha).trace().residue()
    return CentralElement(conj.deriv, correction)


# ---------------------------------------------------------------------------
# finite-rank determinants and lifts


def finite_rank_det(v: FiniteOperator) -> Fraction:
    """``det(I + v)`` for a finite-rank ``v`` supported on the window."""
    if not v.tail_identity:
        raise InvalidInput("det(I + v) needs an operator that is the identity off the window")
    n = v.window.size
    m = [[(1 if i == j else 0) + v.matrix[i][j] for j in range(n)] for i in range(n)]
    return linalg.det(m)


class BlockA:
    """The operator ``a(gamma)`` on V."""

    def __init__(self, gamma: LaurentMatrix):
        self.gamma = gamma

    def __call__(self, vec: Vector) -> Vector:
        return _polar_vec(self.gamma, vec)

    def reach(self) -> int:
        return 0


class ShiftAdjust:
    """``a(z^d)`` made invertible: each line it kills is sent to a line it misses.

    Killed lines ``z^-n e_i`` (``d_i > 0``, ``n <= d_i``) are paired in order
    with missed lines ``z^-n e_i`` (``d_i < 0``, ``n <= -d_i``).
    """

    def __init__(self, d: Sequence[int]):
        self.d = tuple(d)
        if sum(self.d) != 0:
            raise InvalidInput("shift adjustment needs a zero-sum d")
        killed = [(n, i) for i, di in enumerate(self.d) if di > 0 for n in range(1, di + 1)]
        missed = [(n, i) for i, di in enumerate(self.d) if di < 0 for n in range(1, -di + 1)]
        self.pairing = dict(zip(killed, missed))

    def __call__(self, vec: Vector) -> Vector:
        out: Vector = [dict() for _ in vec]
        for i, comp in enumerate(vec):
            di = self.d[i]
            for e, c in comp.items():
                n = -e
                if di > 0 and n <= di:
                    m, k = self.pairing[(n, i)]
                    out[k][-m] = out[k].get(-m, 0) + c
                else:
                    out[i][e + di] = out[i].get(e + di, 0) + c
        return out

    def reach(self) -> int:
        return max((abs(x) for x in self.d), default=0)


class Perturbation:
    """``I + P`` for a finite-rank ``P`` on a window."""

    def __init__(self, op: FiniteOperator):
        self.op = op

    def __call__(self, vec: Vector) -> Vector:
        w = self.op.window
        coords = _window_coords(vec, w)
        image = [sum((row[k] * coords[k] for k in range(w.size) if coords[k]), Fraction(0)) for row in self.op.matrix]
        return _vec_add(vec, _from_coords(image, w))

    def reach(self) -> int:
        return self.op.window.depth


@dataclass(frozen=True)
class Lift:
    """A group element together with an operator ``u`` on V with ``u ≡ a(gamma)`` mod finite rank."""

    gamma: LaurentMatrix
    factors: tuple = field(default_factory=tuple)

    def __mul__(self, other: Lift) -> Lift:
        return Lift(self.gamma @ other.gamma, self.factors + other.factors)

    def __call__(self, vec: Vector) -> Vector:
        for f in reversed(self.factors):
            vec = f(vec)
        return vec

    def reach(self) -> int:
        reach = 0
        for f in self.factors:
            reach += f.reach()
            if isinstance(f, BlockA):
                reach += max(f.gamma.pole_order(), 0)
        return reach


def canonical_lift(gamma: LaurentMatrix, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Lift:
    """``u = a(gamma_minus) w_d a(gamma_plus)`` from the Birkhoff factors."""
    F = birkhoff_full(gamma, ctx)
    factors = []
    if not F.gamma_minus.is_identity():
        factors.append(BlockA(F.gamma_minus))
    if not F.d.is_zero():
        factors.append(ShiftAdjust(F.d.values))
    factors.append(BlockA(F.gamma_plus))
    return Lift(gamma, tuple(factors))


def perturbed_lift(delta: LaurentMatrix, perturbation: FiniteOperator) -> Lift:
    """``a(delta) (I + P)`` for ``delta`` over ``k[[z]]``."""
    _require_stabilizer(delta)
    return Lift(delta, (BlockA(delta), Perturbation(perturbation)))


def _require_stabilizer(delta: LaurentMatrix) -> None:
    try:
        poles = delta.pole_order()
    except PrecisionExhausted as exc:
        raise NotInStabilizer(str(exc)) from exc
    if poles > 0:
        raise NotInStabilizer("delta has poles, so it does not preserve O^r")
    det = mat_det(delta)
    if not det.coeffs or min(det.coeffs) != 0:
        raise NotInStabilizer("delta is not invertible over k[[z]]")


def chi0(delta: LaurentMatrix, perturbation: FiniteOperator) -> Fraction:
    """``det(a(delta)^-1 v)`` for the lift ``v = a(delta)(I + P)``."""
    _require_stabilizer(delta)
    w = perturbation.window
    A = block_a(delta, w)
    lifted = _window_matrix(perturbed_lift(delta, perturbation), w)
    try:
        Ainv = linalg.inverse(A)
    except ZeroDivisionError as exc:
        raise NotInStabilizer("a(delta) is not invertible on the window") from exc
    return linalg.det(linalg.matmul(Ainv, lifted))


def _tau_at(lift: Lift, ginv: LaurentMatrix, w: WindowSpec) -> Fraction:
    m = _window_matrix(lambda v: lift(_polar_vec(ginv, v)), w)
    return linalg.det(m)


def tau_of_lift(lift: Lift, w: WindowSpec | None = None, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Fraction:
    """``det(u a(gamma^-1))`` read on a window large enough to hold the finite-rank part."""
    gamma = lift.gamma
    r = gamma.rank
    ginv = mat_inverse(gamma, ctx)
    base = max(lift.reach(), 1)
    if w is None:
        w = WindowSpec(base, r)
    elif w.depth < base:
        raise WindowTooSmall(f"window depth {w.depth} is below the certified minimum {base}")
    try:
        values = [_tau_at(lift, ginv, w.grow(k)) for k in range(3)]
    except WindowTooSmall:
        raise
    except PrecisionExhausted as exc:
        raise WindowTooSmall(str(exc)) from exc
    if len(set(values)) != 1:
        raise WindowTooSmall(f"tau is not stable across windows: {values}")
    return values[0]


def tau(gamma: LaurentMatrix, w: WindowSpec | None = None, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Fraction:
    return tau_of_lift(canonical_lift(gamma, ctx), w, ctx)


def tau_shifted(delta: LaurentMatrix, gamma: LaurentMatrix, w: WindowSpec | None = None,
                ctx: PrecisionContext = DEFAULT_CONTEXT) -> Fraction:
    return tau(mat_inverse(delta, ctx) @ gamma, w, ctx)


# ---------------------------------------------------------------------------
# change of complement


def conjugated_block_difference(gamma: LaurentMatrix, L: dict[tuple[int, int], Vector], w: WindowSpec):
    """Compare ``a`` for the complement ``V' = {v + L v}`` with ``a`` for ``V``.

    ``L`` maps finitely many basis lines ``(n, i)`` of V to vectors of O^r
    (nonnegative exponents).  With ``phi(v) = v + L v``, the operator
    ``phi^-1 a'(gamma) phi`` is computed by projecting ``gamma(v + L v)``
    onto ``V'`` along ``O^r``.  Returns the window matrix of
    ``phi^-1 a'(gamma) phi - a(gamma)`` and its rank.
    """
    r = w.rank

    def conjugated(vec: Vector) -> Vector:
        lifted = [dict(c) for c in vec]
        for (n, i), image in L.items():
            c = vec[i].get(-n)
            if c:
                for k, comp in enumerate(image):
                    for e, x in comp.items():
                        if e < 0:
                            raise InvalidInput("L must take values in O^r")
                        lifted[k][e] = lifted[k].get(e, 0) + c * x
        # projection onto V' along O^r has V-coordinate equal to the polar part
        return _polar_vec(gamma, lifted)

    a_prime = _window_matrix(conjugated, w)
    a_plain = block_a(gamma, w)
    diff = [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a_prime, a_plain)]
    return diff, linalg.rank(diff)
