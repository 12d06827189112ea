from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from loom.cli import run
from loom.laurent import LaurentMatrix

from conftest import mat


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def doc(m: LaurentMatrix) -> str:
    return json.dumps(m.to_json())


BIG = mat([["2", "z^-1"], ["z", "1"]])
SHIFT = mat([["z^-1", "0"], ["0", "z"]])


def test_verlinde_example():
    code, out, _ = call("verlinde", "--rank", "2", "--level", "2", "--genus", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["dimension"] == 10 and payload["schema_version"] == 1


def test_verlinde_terms_and_exact_backend():
    code, out, _ = call("verlinde", "--rank", "2", "--level", "1", "--genus", "3", "--backend", "exact", "--terms")
    payload = json.loads(out)
    assert code == 0 and payload["dimension"] == 8 and len(payload["terms"]) == 3


def test_dvector_from_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(doc(SHIFT))
    code, out, _ = call("dvector", "--input", str(path))
    assert code == 0 and json.loads(out)["d"] == [-1, 1]


def test_tate_check_example():
    code, out, _ = call("tate-check", "--seed", "7", "--trials", "50", "--rank", "2")
    payload = json.loads(out)
    assert code == 0 and payload["trials"] == 50 and payload["all_equal"] is True


def test_birkhoff_roundtrip():
    code, out, _ = call("birkhoff", "--input", doc(BIG), "--big-cell")
    payload = json.loads(out)
    assert code == 0 and payload["d"] == [0, 0]
    minus = LaurentMatrix.from_json(payload["gamma_minus"])
    plus = LaurentMatrix.from_json(payload["gamma_plus"])
    assert (minus @ plus).agrees_with(BIG)


def test_emitted_matrices_reparse_equal():
    alpha = mat([["z", "z^-2"], ["1/3", "-z"]])
    element = json.dumps({"alpha": alpha.to_json(), "s": "1/2"})
    code, out, _ = call("adjoint", "--gamma", doc(SHIFT), "--element", element)
    payload = json.loads(out)
    assert code == 0
    back = LaurentMatrix.from_json(payload["alpha"])
    assert back == SHIFT @ alpha @ mat([["z", "0"], ["0", "z^-1"]])
    assert LaurentMatrix.from_json(back.to_json()) == back


def test_other_commands():
    assert json.loads(call("pole-bound", "--input", doc(BIG))[1])["pole_bound"] == 1
    assert json.loads(call("tau", "--input", doc(SHIFT))[1])["tau"] == "0/1"
    assert json.loads(call("cohomology", "--input", doc(SHIFT))[1])["h0"] == 2
    assert json.loads(call("theta-check", "--input", doc(SHIFT))[1])["ok"] is True
    upper = mat([["1", "z"], ["0", "1"]])
    assert json.loads(call("smith-infinity", "--input", doc(upper), "--N", "1")[1])["d"] == [0, 2]


def test_stdin_input(monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(doc(SHIFT)))
    code, out, _ = call("dvector", "--input", "-")
    assert code == 0 and json.loads(out)["d"] == [-1, 1]


def test_tsv_table():
    code, out, _ = call("--format", "tsv", "verlinde-table", "--max-rank", "2", "--max-level", "1", "--max-genus", "1")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "r\tc\tg\tdimension" and len(lines) == 5


@pytest.mark.parametrize(
    "argv,code,error",
    [
        (("verlinde", "--rank", "1", "--level", "1", "--genus", "0"), 2, "invalid_input"),
        (("dvector", "--input", "{not json"), 2, "invalid_input"),
        (("birkhoff", "--big-cell", "--input", doc(SHIFT)), 4, None),
        (("cohomology", "--input", doc(mat([["1", "z"], ["z", "z^2"]]))), 4, None),
        (("--prec", "0", "dvector", "--input", doc(SHIFT)), 2, None),
    ],
)
def test_error_exit_codes(argv, code, error):
    got, out, err = call(*argv)
    assert got == code
    payload = json.loads(out)
    assert set(payload["error"]) == {"code", "message"}
    if error:
        assert payload["error"]["code"] == error
    assert err.startswith("loom:")


def test_bad_flags_exit_two():
    assert call("verlinde", "--rank", "x")[0] == 2
    assert call()[0] == 2


def test_determinism():
    first = call("tate-check", "--seed", "3", "--trials", "10")[1]
    second = call("tate-check", "--seed", "3", "--trials", "10")[1]
    assert first == second
    a = call("theta-check", "--seed", "2")
    b = call("theta-check", "--seed", "2")
    assert a == b and a[0] == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "loom", "verlinde", "--rank", "3", "--level", "1", "--genus", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["dimension"] == 9


def test_selftest_passes():
    code, out, _ = call("selftest", "--seed", "0")
    payload = json.loads(out)
    assert code == 0 and payload["all_passed"]
    assert {c["name"] for c in payload["checks"]} >= {"verlinde", "tate_identity", "birkhoff", "theta_tau"}
