"""Independent reference computations used only by the tests."""

from __future__ import annotations

from itertools import combinations

import sympy

from loom.laurent import LaurentMatrix

z = sympy.Symbol("z")


def to_sympy(M: LaurentMatrix) -> sympy.Matrix:
    return sympy.Matrix(M.rank, M.rank, lambda i, j: sum(
        sympy.Rational(c.numerator, c.denominator) * z**e for e, c in M.rows[i][j].coeffs.items()))


def z_order(expr) -> int:
    """Order at z = 0 of a nonzero Laurent polynomial."""
    num, den = sympy.fraction(sympy.together(sympy.expand(expr)))
    pn, pd = sympy.Poly(num, z), sympy.Poly(den, z)
    low = lambda p: min(m[0] for m in p.monoms())
    return low(pn) - low(pd)


def determinantal_dvector(M: LaurentMatrix) -> list[int]:
    """Elementary divisor exponents from minimal orders of p x p minors."""
    S = to_sympy(M)
    r = M.rank
    prefix = [0]
    for p in range(1, r + 1):
        orders = []
        for rows in combinations(range(r), p):
            for cols in combinations(range(r), p):
                minor = sympy.expand(S.extract(list(rows), list(cols)).det())
                if minor != 0:
                    orders.append(z_order(minor))
        prefix.append(min(orders))
    return [prefix[i + 1] - prefix[i] for i in range(r)]


def principal_minor_sum_det(matrix) -> sympy.Rational:
    """det(I + v) as the sum of all principal minors of v."""
    n = len(matrix)
    v = sympy.Matrix(matrix)
    total = sympy.Integer(1)
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            total += v.extract(list(idx), list(idx)).det()
    return total
