"""Seeded invariant suites across all modules.

Each suite returns a :class:`CheckResult`.  ``run_all`` is what the
``selftest`` command executes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb

from .cohomology import calibrate_epsilon, cohomology_p1, h0_closed_form, theta_tau_check, truncated_cohomology
from .extension import (
    CentralElement,
    FiniteOperator,
    WindowSpec,
    adjoint_action,
    adjoint_first_order,
    canonical_lift,
    chi0,
    finite_rank_det,
    hat_bracket,
    perturbed_lift,
    residue_pairing,
    tate_cocycle,
    tau,
    tau_of_lift,
)
from .grassmann import (
    birkhoff_full,
    dense_orbit_dvector,
    degeneration_identity_check,
    dominance_leq,
    infinity_invariant_factors,
    lattice_dvector,
    qN_level,
    special_dvectors,
)
from .laurent import LaurentMatrix, mat_det, mat_inverse
from .samples import (
    random_big_cell,
    random_elementary,
    random_loop,
    random_negative_traceless,
    random_rational,
    random_sl_negative,
    random_sl_positive,
    random_traceless,
    random_unimodular_polynomial,
)
from .verlinde import VerlindeQuery, smatrix_oracle, verlinde_number


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _central_equal(x: CentralElement, y: CentralElement) -> bool:
    return x.alpha == y.alpha and x.s == y.s


def check_verlinde(seed: int = 0) -> CheckResult:
    failures = []
    for r in range(2, 6):
        for c in range(7):
            if verlinde_number(VerlindeQuery(r, c, 0)) != 1:
                failures.append(("genus0", r, c))
    for r, c, g in product((2, 3, 4), range(5), range(5)):
        q = VerlindeQuery(r, c, g)
        a = verlinde_number(q)
        if a != verlinde_number(q, "exact") or a != smatrix_oracle(q):
            failures.append(("agree", r, c, g))
        if g == 1 and a != comb(r + c - 1, r - 1):
            failures.append(("genus1", r, c))
        if c == 1 and a != r**g:
            failures.append(("level1", r, g))
    return CheckResult("verlinde", not failures, f"failures: {failures}" if failures else "all cells agree")


def check_tate(seed: int = 0, trials: int = 200) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for k in range(trials):
        r = 2 + k % 2
        a = random_traceless(rng, r, rng.randint(0, 4), rng.randint(0, 4))
        b = random_traceless(rng, r, rng.randint(0, 4), rng.randint(0, 4))
        if tate_cocycle(a, b) != residue_pairing(a, b):
            bad += 1
    return CheckResult("tate_identity", bad == 0, f"{trials - bad}/{trials} equal")


def check_central_extension(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = random.Random(seed)
    problems = []
    for k in range(trials):
        r = 2 + k % 2
        x, y, z = (CentralElement(random_traceless(rng, r, 2, 2), random_rational(rng)) for _ in range(3))
        jac = hat_bracket(x, hat_bracket(y, z)) + hat_bracket(y, hat_bracket(z, x)) + hat_bracket(z, hat_bracket(x, y))
        if not (jac.alpha == LaurentMatrix.zero(r) and jac.s == 0):
            problems.append(("jacobi", k))
    for k in range(trials // 2):
        r = 2 + k % 2
        a, b, c = (random_traceless(rng, r, 2, 2) for _ in range(3))
        lam = random_rational(rng)
        if tate_cocycle(a, b) != -tate_cocycle(b, a):
            problems.append(("antisymmetry", k))
        if tate_cocycle(a + b.scale(lam), c) != tate_cocycle(a, c) + lam * tate_cocycle(b, c):
            problems.append(("bilinearity", k))
    for k in range(trials // 2):
        r = 2 + k % 2
        g = random_elementary(rng, r, rng.choice((1, -1)), 2)
        h = random_elementary(rng, r, rng.choice((1, -1)), 2)
        x = CentralElement(random_traceless(rng, r, 2, 2), random_rational(rng))
        if not _central_equal(adjoint_action(g @ h, x), adjoint_action(g, adjoint_action(h, x))):
            problems.append(("multiplicativity", k))
        beta = random_traceless(rng, r, 2, 2)
        if not _central_equal(adjoint_first_order(beta, x), hat_bracket(CentralElement(beta), x)):
            problems.append(("first_order", k))
    return CheckResult("central_extension", not problems, f"problems: {problems[:5]}" if problems else "all exact")


def check_residue_theorem(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = random.Random(seed)
    bad = sum(
        residue_pairing(random_negative_traceless(rng, r, 3), random_negative_traceless(rng, r, 3)) != 0
        for r in (2 + k % 2 for k in range(trials))
    )
    return CheckResult("residue_theorem", bad == 0, f"{bad} nonzero residues")


def check_birkhoff(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = random.Random(seed)
    problems = []
    for k in range(trials):
        r = 2 + k % 2
        gamma = random_loop(rng, r, windowed=(k % 5 == 0))
        F = birkhoff_full(gamma)
        if not F.product().agrees_with(gamma):
            problems.append(("roundtrip", k))
        # the lattice of gamma_minus^-1 gamma is z^d O^r
        if lattice_dvector(mat_inverse(F.gamma_minus) @ gamma) != F.d:
            problems.append(("lattice_of_reduced", k))
        if not dominance_leq(lattice_dvector(gamma), F.d):
            problems.append(("closure", k))
        u = random_sl_negative(rng, r, 1, 2)
        h = random_sl_positive(rng, r, 1, 2)
        if birkhoff_full(u @ gamma @ h).d != F.d:
            problems.append(("double_coset", k))
    return CheckResult("birkhoff", not problems, f"problems: {problems[:5]}" if problems else f"{trials} loops")


def check_orbits(seed: int = 0) -> CheckResult:
    problems = []
    for r in range(1, 5):
        for N in range(4):
            ds = special_dvectors(r, N)
            for d in ds:
                zd = LaurentMatrix.z_power(d.values)
                if lattice_dvector(zd) != d or qN_level(zd) > N:
                    problems.append(("sandwich", d))
                if not dominance_leq(dense_orbit_dvector(r, N), d):
                    problems.append(("dense", r, N, d))
            for a in ds:
                if not dominance_leq(a, a):
                    problems.append(("reflexive", a))
                for b in ds:
                    ab = dominance_leq(a, b)
                    if ab and dominance_leq(b, a) and a != b:
                        problems.append(("antisymmetric", a, b))
                    if ab:
                        for c in ds:
                            if dominance_leq(b, c) and not dominance_leq(a, c):
                                problems.append(("transitive", a, b, c))
    for d1 in range(-3, 4):
        for d2 in range(d1 + 1, 4):
            if not degeneration_identity_check(d1, d2):
                problems.append(("degeneration", d1, d2))
    return CheckResult("orbits", not problems, f"problems: {problems[:5]}" if problems else "order and family verified")


def check_cohomology(seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    eps = calibrate_epsilon()
    problems = []
    cases = [LaurentMatrix.z_power(d) for d in [(0, 0), (-1, 1), (-2, 2), (1, 1), (-1, -1), (0, 2), (-3, 0, 1), (2, 2, -1)]]
    cases += [random_loop(rng, 2 + k % 2) for k in range(6)]
    for gamma in cases:
        res = cohomology_p1(gamma)
        n = mat_det(gamma).order()
        if res.euler != gamma.rank - n:
            problems.append(("euler", repr(gamma)))
        if all(x.is_zero() for i, row in enumerate(gamma.rows) for j, x in enumerate(row) if i != j):
            d = [gamma.rows[i][i].order() for i in range(gamma.rank)]
            if res.h0 != h0_closed_form(d, eps):
                problems.append(("closed_form", d))
        if truncated_cohomology(gamma, 2 * res.stabilized_at) != (res.h0, res.h1):
            problems.append(("stability", repr(gamma)))
    return CheckResult("cohomology", not problems, f"eps = {eps}; problems: {problems[:5]}")


def theta_suite(seed: int = 0) -> list[LaurentMatrix]:
    rng = random.Random(seed)
    suite = [LaurentMatrix.identity(2), LaurentMatrix.identity(3)]
    suite += [LaurentMatrix.z_power(d) for d in [(-1, 1), (-2, 2), (-1, 0, 1), (-2, 1, 1), (-1, -1, 2)]]
    suite += [random_big_cell(rng, 2 + k % 2) for k in range(10)]
    suite += [random_loop(rng, 2 + k % 2) for k in range(15)]
    return suite


def check_theta(seed: int = 0) -> CheckResult:
    rng = random.Random(seed + 1)
    problems = []
    for k, gamma in enumerate(theta_suite(seed)):
        if not theta_tau_check(gamma):
            problems.append(("theta", k))
    for k in range(10):
        r = 2 + k % 2
        gamma = random_big_cell(rng, r) if k % 2 == 0 else random_loop(rng, r)
        delta = random_sl_positive(rng, r, 1, 2)
        if tau(gamma @ delta) != tau(gamma):
            problems.append(("equivariance", k))
        w = WindowSpec(2, r)
        lam = random_rational(rng)
        if lam == -1:
            lam = Fraction(2)
        P = FiniteOperator.cell(w, 0, 0, lam)
        lifted = canonical_lift(gamma) * perturbed_lift(delta, P)
        if tau_of_lift(lifted) != chi0(delta, P) * tau(gamma) or chi0(delta, P) != finite_rank_det(P):
            problems.append(("chi0", k))
    return CheckResult("theta_tau", not problems, f"problems: {problems[:5]}" if problems else "suite consistent")


def check_infinity(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for k in range(trials):
        r = 2 + k % 2
        N = rng.randint(1, 3)
        A = random_unimodular_polynomial(rng, r, N)
        if sum(infinity_invariant_factors(A, N)) != r * N:
            bad += 1
    return CheckResult("infinity_factors", bad == 0, f"{bad} failures of the rN sum")


SUITES = {
    "verlinde": check_verlinde,
    "tate_identity": check_tate,
    "central_extension": check_central_extension,
    "residue_theorem": check_residue_theorem,
    "birkhoff": check_birkhoff,
    "orbits": check_orbits,
    "cohomology": check_cohomology,
    "theta_tau": check_theta,
    "infinity_factors": check_infinity,
}


def run_all(seed: int = 0) -> list[CheckResult]:
    return [fn(seed) for fn in SUITES.values()]
