"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run directly (``python tests/test_acceptance.py``) for the lines alone.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from loom.cohomology import calibrate_epsilon, cohomology_p1, h0_closed_form, theta_tau_check, truncated_cohomology
from loom.extension import (
    CentralElement,
    adjoint_action,
    adjoint_first_order,
    default_tate_window,
    hat_bracket,
    residue_pairing,
    tate_cocycle,
    tau,
)
from loom.grassmann import (
    DVector,
    birkhoff_full,
    degeneration_identity_check,
    dense_orbit_dvector,
    dominance_leq,
    infinity_invariant_factors,
    lattice_dvector,
    qN_level,
    special_dvectors,
)
from loom.laurent import LaurentMatrix, mat_det, mat_inverse
from loom.samples import (
    random_big_cell,
    random_elementary,
    random_loop,
    random_rational,
    random_sl_negative,
    random_sl_positive,
    random_traceless,
    random_unimodular_polynomial,
)
from loom.selftest import theta_suite
from loom.verlinde import VerlindeQuery, smatrix_oracle, verlinde_number

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution
    ACCEPTANCE_LINES = []

SEED = 20240601


def report(label: str, ok: bool, detail: str, elapsed: float) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label:<34} {elapsed:7.2f}s  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# ---------------------------------------------------------------------------


def criterion_1():
    bad = [(r, c) for r in range(2, 6) for c in range(7) if verlinde_number(VerlindeQuery(r, c, 0)) != 1]
    return not bad, f"{28 - len(bad)}/28 cells equal 1"


def criterion_2():
    bad = []
    for r, c, g in product((2, 3, 4), range(5), range(5)):
        q = VerlindeQuery(r, c, g)
        a = verlinde_number(q)
        if not (a == verlinde_number(q, "exact") == smatrix_oracle(q)):
            bad.append((r, c, g))
    anchors = verlinde_number(VerlindeQuery(2, 1, 2)) == 4 and verlinde_number(VerlindeQuery(2, 2, 2)) == 10
    return not bad and anchors, f"75 cells, disagreements {bad}, anchors {'ok' if anchors else 'wrong'}"


def criterion_3():
    bad = [("g1", r, c) for r in (2, 3, 4) for c in range(5)
           if verlinde_number(VerlindeQuery(r, c, 1)) != comb(r + c - 1, r - 1)]
    bad += [("c1", r, g) for r in (2, 3, 4) for g in range(5) if verlinde_number(VerlindeQuery(r, 1, g)) != r**g]
    return not bad, f"failures {bad}"


def criterion_4():
    rng = random.Random(SEED)
    bad = 0
    for k in range(200):
        r = 2 + k % 2
        a = random_traceless(rng, r, rng.randint(0, 4), rng.randint(0, 4))
        b = random_traceless(rng, r, rng.randint(0, 4), rng.randint(0, 4))
        w = default_tate_window(a, b)
        values = {tate_cocycle(a, b, w.grow(j)) for j in range(3)}
        if values != {residue_pairing(a, b)}:
            bad += 1
    return bad == 0, f"{200 - bad}/200 equal and stable at M, M+1, M+2"


def criterion_5():
    rng = random.Random(SEED)
    problems = []
    for k in range(100):
        r = 2 + k % 2
        x, y, z = (CentralElement(random_traceless(rng, r, 2, 2), random_rational(rng)) for _ in range(3))
        jac = hat_bracket(x, hat_bracket(y, z)) + hat_bracket(y, hat_bracket(z, x)) + hat_bracket(z, hat_bracket(x, y))
        if jac.alpha != LaurentMatrix.zero(r) or jac.s != 0:
            problems.append(("jacobi", k))
        a, b, c = x.alpha, y.alpha, z.alpha
        lam = random_rational(rng)
        if tate_cocycle(a, b) != -tate_cocycle(b, a):
            problems.append(("antisymmetry", k))
        if tate_cocycle(a.scale(lam) + b, c) != lam * tate_cocycle(a, c) + tate_cocycle(b, c):
            problems.append(("linear_left", k))
        if tate_cocycle(c, a.scale(lam) + b) != lam * tate_cocycle(c, a) + tate_cocycle(c, b):
            problems.append(("linear_right", k))
        g = random_elementary(rng, r, rng.choice((1, -1)), 2)
        h = random_elementary(rng, r, rng.choice((1, -1)), 2)
        lhs, rhs = adjoint_action(g @ h, x), adjoint_action(g, adjoint_action(h, x))
        if lhs.alpha != rhs.alpha or lhs.s != rhs.s:
            problems.append(("multiplicativity", k))
        first, bracket = adjoint_first_order(a, y), hat_bracket(CentralElement(a), y)
        if first.alpha != bracket.alpha or first.s != bracket.s:
            problems.append(("first_order", k))
    return not problems, f"100 triples, problems {problems[:4]}"


def criterion_6():
    rng = random.Random(SEED)
    nonzero = 0
    for k in range(100):
        r = 2 + k % 2
        if residue_pairing(random_traceless(rng, r, 3, 0), random_traceless(rng, r, 3, 0)) != 0:
            nonzero += 1
    return nonzero == 0, f"{100 - nonzero}/100 exact zeros"


def _loops(n: int = 100):
    rng = random.Random(SEED)
    return rng, [random_loop(rng, 2 + k % 2, max_pole=3, windowed=(k % 5 == 0)) for k in range(n)]


def criterion_7():
    eps = calibrate_epsilon()
    rng, loops = _loops()
    roundtrip = matched = coset = 0
    for gamma in loops:
        r = gamma.rank
        F = birkhoff_full(gamma)
        roundtrip += F.product().agrees_with(gamma)
        lat = lattice_dvector(gamma)
        flipped = DVector(tuple(sorted(eps * x for x in lat)))
        matched += F.d in (lat, flipped)
        u, h = random_sl_negative(rng, r, 1, 2), random_sl_positive(rng, r, 1, 2)
        coset += birkhoff_full(u @ gamma @ h).d == F.d
    ok = roundtrip == matched == coset == 100
    return ok, f"round-trip {roundtrip}/100, d == lattice_dvector(gamma) {matched}/100, double coset {coset}/100"


def criterion_7_corrected():
    _, loops = _loops()
    reduced = closure = 0
    for gamma in loops:
        F = birkhoff_full(gamma)
        reduced += lattice_dvector(mat_inverse(F.gamma_minus) @ gamma) == F.d
        closure += dominance_leq(lattice_dvector(gamma), F.d)
    return reduced == closure == 100, (
        f"d == lattice_dvector(gamma_minus^-1 gamma) {reduced}/100, lattice orbit in closure {closure}/100")


def criterion_8():
    problems = []
    for r in range(1, 5):
        for N in range(4):
            ds = special_dvectors(r, N)
            dense = dense_orbit_dvector(r, N)
            for a in ds:
                if not (-N <= a[0] and a[-1] <= N) or qN_level(LaurentMatrix.z_power(a.values)) > N:
                    problems.append(("sandwich", r, N, a.values))
                if not dominance_leq(dense, a):
                    problems.append(("dense", r, N, a.values))
                if not dominance_leq(a, a):
                    problems.append(("reflexive", a.values))
                for b in ds:
                    ab, ba = dominance_leq(a, b), dominance_leq(b, a)
                    if ab and ba and a != b:
                        problems.append(("antisymmetric", a.values, b.values))
                    if ab and any(dominance_leq(b, c) and not dominance_leq(a, c) for c in ds):
                        problems.append(("transitive", a.values, b.values))
    return not problems, f"r <= 4, N <= 3, problems {problems[:4]}"


def criterion_9():
    checks = [degeneration_identity_check(d1, d2) for d1 in range(-3, 4) for d2 in range(d1 + 1, 4)]
    ok = all(checks)
    exps = {(c.d1, c.d2): c.entry_21_exponent for c in checks}
    pattern = "d1" if all(e == d1 for (d1, _), e in exps.items()) else str(exps)
    return ok, f"{sum(map(bool, checks))}/{len(checks)} pairs verified; (2,1) entry = -t^2 z^e with e = {pattern}"


def _cohomology_cases():
    diag = [(0, 0), (-1, 1), (-2, 2), (1, 1), (-1, -1), (0, 2), (-3, 0, 1), (2, 2, -1)]
    rng = random.Random(SEED)
    return [LaurentMatrix.z_power(d) for d in diag] + [random_loop(rng, 2 + k % 2) for k in range(8)]


def criterion_10():
    eps = calibrate_epsilon()
    euler_bad, closed_bad, stable_bad = [], [], []
    for gamma in _cohomology_cases():
        res = cohomology_p1(gamma)
        n = mat_det(gamma).order()
        if res.euler != n + gamma.rank:
            euler_bad.append((repr(gamma), res.euler, n + gamma.rank))
        diagonal = all(x.is_zero() for i, row in enumerate(gamma.rows) for j, x in enumerate(row) if i != j)
        if diagonal:
            d = [gamma.rows[i][i].order() for i in range(gamma.rank)]
            if res.h0 != h0_closed_form(d, eps):
                closed_bad.append(d)
        D = res.stabilized_at
        if any(truncated_cohomology(gamma, D + k) != (res.h0, res.h1) for k in (2, 4, D)):
            stable_bad.append(repr(gamma))
    ok = not (euler_bad or closed_bad or stable_bad)
    detail = (f"eps = {eps}; euler == ord det + r fails on {len(euler_bad)} cases "
              f"{[(m, got, want) for m, got, want in euler_bad[:2]]}; closed form failures {closed_bad}; "
              f"unstable {stable_bad}")
    return ok, detail


def criterion_10_corrected():
    bad = []
    for gamma in _cohomology_cases():
        res = cohomology_p1(gamma)
        if res.euler != gamma.rank - mat_det(gamma).order():
            bad.append(repr(gamma))
    return not bad, f"euler == r - ord det on all {len(_cohomology_cases())} cases; failures {bad}"


def criterion_11():
    suite = theta_suite(SEED)
    checks = [theta_tau_check(g) for g in suite]
    rng = random.Random(SEED)
    equiv = 0
    for k in range(10):
        r = 2 + k % 2
        gamma = random_big_cell(rng, r) if k % 2 == 0 else random_loop(rng, r)
        equiv += tau(gamma @ random_sl_positive(rng, r, 1, 2)) == tau(gamma)
    ok = len(suite) >= 30 and all(checks) and equiv == 10
    return ok, f"theta {sum(map(bool, checks))}/{len(suite)}, equivariance {equiv}/10"


def criterion_12():
    rng = random.Random(SEED)
    bad = 0
    for k in range(100):
        r, N = 2 + k % 2, rng.randint(1, 3)
        bad += sum(infinity_invariant_factors(random_unimodular_polynomial(rng, r, N), N)) != r * N
    parse = LaurentMatrix.parse
    examples = [
        infinity_invariant_factors(LaurentMatrix.identity(2), 0) == DVector((0, 0)),
        infinity_invariant_factors(parse([["1", "z"], ["0", "1"]]), 1) == DVector((0, 2)),
        infinity_invariant_factors(parse([["1 + z^2", "z"], ["z", "1"]]), 2) == DVector((0, 4)),
    ]
    return bad == 0 and all(examples), f"sum rN on {100 - bad}/100, examples {sum(examples)}/3"


CRITERIA = [
    ("1 genus-zero normalization", criterion_1, 5.0),
    ("2 integrality and oracle", criterion_2, 60.0),
    ("3 closed forms", criterion_3, None),
    ("4 Tate identity", criterion_4, 30.0),
    ("5 central extension algebra", criterion_5, None),
    ("6 genus-zero residue theorem", criterion_6, None),
    ("7 Birkhoff round-trip", criterion_7, 60.0),
    ("7b Birkhoff, reduced-lattice form", criterion_7_corrected, 60.0),
    ("8 orbit stratification", criterion_8, None),
    ("9 degeneration identity", criterion_9, None),
    ("10 genus-zero cohomology", criterion_10, None),
    ("10b Euler characteristic r - n", criterion_10_corrected, None),
    ("11 theta and tau", criterion_11, None),
    ("12 invariant factors at infinity", criterion_12, None),
]


@pytest.mark.parametrize("label,fn,limit", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(label, fn, limit):
    ok, detail, elapsed = timed(fn)
    if limit is not None and elapsed >= limit:
        ok = False
        detail += f"; runtime {elapsed:.1f}s exceeds {limit:.0f}s"
    report(label, ok, detail, elapsed)
    assert ok, detail


if __name__ == "__main__":
    for label, fn, limit in CRITERIA:
        ok, detail, elapsed = timed(fn)
        if limit is not None and elapsed >= limit:
            ok = False
        report(label, ok, detail, elapsed)
