"""Dense exact linear algebra over Fraction on plain lists of lists."""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        target = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                brow = b[k]
                for j in range(cols):
                    y = brow[j]
                    if y:
                        target[j] += x * y
    return out


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        nz = [j for j in range(c, cols) if pivot_row[j]]
        for i in range(rows):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for j in nz:
                        row[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(_echelon_pivots(a))


def _echelon_pivots(a: Matrix) -> list[int]:
    # forward elimination only; cheaper than full rref when only rank matters
    m = [list(row) for row in a]
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pivot_row = m[r]
        inv = 1 / pivot_row[c]
        nz = [j for j in range(c + 1, cols) if pivot_row[j]]
        for i in range(r + 1, rows):
            f = m[i][c]
            if f:
                f *= inv
                row = m[i]
                row[c] = Fraction(0)
                for j in nz:
                    row[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
    return pivots


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : a x = 0}."""
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -r[row_idx][f]
        basis.append(v)
    return basis


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [list(row) for row in a]
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        pivot = m[c][c]
        result *= pivot
        inv = 1 / pivot
        for i in range(c + 1, n):
            f = m[i][c]
            if f:
                f *= inv
                row, prow = m[i], m[c]
                for j in range(c + 1, n):
                    if prow[j]:
                        row[j] -= f * prow[j]
    return result


def solve_left(rows_basis: Matrix, target: list[Fraction]) -> list[Fraction] | None:
    """Coefficients x with sum_i x[i] * rows_basis[i] == target, or None."""
    k = len(rows_basis)
    n = len(target)
    # columns of the system are the basis vectors; augmented with target
    aug = [[rows_basis[i][j] for i in range(k)] + [target[j]] for j in range(n)]
    r, pivots = rref(aug)
    if k in pivots:
        return None
    x = [Fraction(0)] * k
    for row_idx, pc in enumerate(pivots):
        x[pc] = r[row_idx][k]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(a)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]
