"""Command-line front end.

Every command prints one JSON document (or TSV with ``--format tsv``) to
stdout.  Failures print ``{"error": {"code": ..., "message": ...}}`` and exit
with 2 (invalid input), 3 (precision), 4 (not invertible / not in the big
cell) or 5 (ambiguous integer snap).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .arith import format_rational, parse_rational
from .errors import InvalidInput, LoomError
from .laurent import LaurentMatrix, PrecisionContext

SCHEMA_VERSION = 1


def _load_json(source: str):
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith(("{", "[")):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InvalidInput(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc


def _load_matrix(source: str) -> LaurentMatrix:
    doc = _load_json(source)
    if isinstance(doc, dict) and "matrix" in doc:
        doc = doc["matrix"]
    if not isinstance(doc, dict):
        raise InvalidInput("expected a matrix document")
    return LaurentMatrix.from_json(doc)


def _ctx(args) -> PrecisionContext:
    target = args.prec if args.prec is not None else 24
    return PrecisionContext(target, max(96, target))


# ---------------------------------------------------------------------------
# command handlers; each returns a JSON-ready dict


def cmd_verlinde(args) -> dict:
    from .verlinde import VerlindeQuery, verlinde_number, verlinde_terms

    q = VerlindeQuery(args.rank, args.level, args.genus)
    out = {"r": q.r, "c": q.c, "g": q.g, "dimension": verlinde_number(q, args.backend), "backend": args.backend}
    if args.terms:
        out["terms"] = [
            {"subset": list(S), "lo": str(iv.lo), "hi": str(iv.hi)} for S, iv in verlinde_terms(q)
        ]
    return out


def cmd_verlinde_table(args) -> dict:
    from .verlinde import VerlindeQuery, verlinde_number

    rows = []
    for r in range(2, args.max_rank + 1):
        for c in range(args.max_level + 1):
            for g in range(args.max_genus + 1):
                q = VerlindeQuery(r, c, g)
                rows.append({"r": r, "c": c, "g": g, "dimension": verlinde_number(q, args.backend)})
    return {"backend": args.backend, "rows": rows}


def cmd_dvector(args) -> dict:
    from .grassmann import lattice_dvector

    return lattice_dvector(_load_matrix(args.input), _ctx(args)).to_json()


def cmd_birkhoff(args) -> dict:
    from .grassmann import birkhoff_big_cell, birkhoff_full

    gamma = _load_matrix(args.input)
    fn = birkhoff_big_cell if args.big_cell else birkhoff_full
    return fn(gamma, _ctx(args)).to_json()


def cmd_pole_bound(args) -> dict:
    from .laurent import pole_bound

    return {"pole_bound": pole_bound(_load_matrix(args.input), _ctx(args))}


def cmd_tate_check(args) -> dict:
    from .extension import residue_pairing, tate_cocycle
    from .samples import random_traceless

    rng = random.Random(args.seed)
    mismatches = []
    for k in range(args.trials):
        a = random_traceless(rng, args.rank, rng.randint(0, args.max_pole), rng.randint(0, args.max_degree))
        b = random_traceless(rng, args.rank, rng.randint(0, args.max_pole), rng.randint(0, args.max_degree))
        lhs, rhs = tate_cocycle(a, b), residue_pairing(a, b)
        if lhs != rhs:
            mismatches.append({"trial": k, "cocycle": format_rational(lhs), "residue": format_rational(rhs)})
    return {"trials": args.trials, "all_equal": not mismatches, "mismatches": mismatches}


def cmd_adjoint(args) -> dict:
    from .extension import CentralElement, adjoint_action

    gamma = _load_matrix(args.gamma)
    doc = _load_json(args.element)
    if not isinstance(doc, dict) or "alpha" not in doc:
        raise InvalidInput('element must be {"alpha": <matrix>, "s": "p/q"}')
    x = CentralElement(LaurentMatrix.from_json(doc["alpha"]), parse_rational(doc.get("s", "0")))
    return adjoint_action(gamma, x, _ctx(args)).to_json()


def cmd_tau(args) -> dict:
    from .extension import tau

    value = tau(_load_matrix(args.input), ctx=_ctx(args))
    return {"tau": format_rational(value)}


def cmd_cohomology(args) -> dict:
    from .cohomology import cohomology_p1

    return cohomology_p1(_load_matrix(args.input), _ctx(args)).to_json()


def cmd_theta_check(args) -> dict:
    from .cohomology import theta_tau_check
    from .selftest import theta_suite

    if args.input:
        return theta_tau_check(_load_matrix(args.input), _ctx(args)).to_json()
    results = [theta_tau_check(g, _ctx(args)) for g in theta_suite(args.seed)]
    return {"cases": len(results), "all_ok": all(results), "results": [r.to_json() for r in results]}


def cmd_smith_infinity(args) -> dict:
    from .grassmann import infinity_invariant_factors

    return infinity_invariant_factors(_load_matrix(args.input), args.N).to_json()


def cmd_selftest(args) -> dict:
    from .selftest import run_all

    results = run_all(args.seed)
    return {"all_passed": all(r.passed for r in results), "checks": [r.to_json() for r in results]}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loom", description="Exact loop-group and Verlinde computations.")
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    parser.add_argument("--prec", type=int, default=None, help="series truncation exponent (default 24)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verlinde", help="dimension of conformal blocks")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--backend", choices=("interval", "exact"), default="interval")
    p.add_argument("--terms", action="store_true", help="include per-subset intervals")
    p.set_defaults(handler=cmd_verlinde)

    p = sub.add_parser("verlinde-table", help="dimensions over a grid of (r, c, g)")
    p.add_argument("--max-rank", type=int, default=4)
    p.add_argument("--max-level", type=int, default=4)
    p.add_argument("--max-genus", type=int, default=4)
    p.add_argument("--backend", choices=("interval", "exact"), default="interval")
    p.set_defaults(handler=cmd_verlinde_table)

    for name, handler, help_text in [
        ("dvector", cmd_dvector, "invariant factors of the lattice spanned by a matrix"),
        ("birkhoff", cmd_birkhoff, "Birkhoff factorization"),
        ("pole-bound", cmd_pole_bound, "least N with the matrix in G^(N)"),
        ("tau", cmd_tau, "tau-function with the canonical lift"),
        ("cohomology", cmd_cohomology, "h0 and h1 of the bundle on the projective line"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="path, inline JSON, or - for stdin")
        if name == "birkhoff":
            p.add_argument("--big-cell", action="store_true", help="require d = 0 and normalize at infinity")
        p.set_defaults(handler=handler)

    p = sub.add_parser("tate-check", help="compare the cocycle with the residue on random pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--max-pole", type=int, default=4)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(handler=cmd_tate_check)

    p = sub.add_parser("adjoint", help="adjoint action on the central extension")
    p.add_argument("--gamma", required=True)
    p.add_argument("--element", required=True)
    p.set_defaults(handler=cmd_adjoint)

    p = sub.add_parser("theta-check", help="tau vanishing versus sections of the twisted bundle")
    p.add_argument("--input", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_theta_check)

    p = sub.add_parser("smith-infinity", help="invariant factors at infinity of a polynomial matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(handler=cmd_smith_infinity)

    p = sub.add_parser("selftest", help="run every invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_selftest)
    return parser


def _tsv(doc: dict) -> str:
    rows = doc.get("rows")
    if isinstance(rows, list) and rows and isinstance(rows[0], dict):
        keys = list(rows[0])
        lines = ["\t".join(keys)] + ["\t".join(str(row[k]) for k in keys) for row in rows]
        return "\n".join(lines) + "\n"
    lines = []
    for key, value in doc.items():
        text = value if isinstance(value, str) else json.dumps(value, separators=(",", ":"))
        lines.append(f"{key}\t{text}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.prec is not None and args.prec < 1:
            raise InvalidInput("--prec must be positive")
        result = args.handler(args)
    except LoomError as exc:
        doc = {"schema_version": SCHEMA_VERSION, "error": {"code": exc.code, "message": str(exc)}}
        stdout.write(json.dumps(doc) + "\n")
        stderr.write(f"loom: {exc.code}: {exc}\n")
        return exc.exit_code
    doc = {"schema_version": SCHEMA_VERSION, **result}
    if args.format == "tsv":
        stdout.write(_tsv(doc))
    else:
        stdout.write(json.dumps(doc) + "\n")
    if args.command == "selftest" and not result["all_passed"]:
        return 1
    if args.command == "theta-check" and not result.get("all_ok", result.get("ok", True)):
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
