import io
import json
import subprocess
import sys

import pytest

from tbispec.cli import main


def run(argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def doc(*dists):
    return json.dumps({"distributions": [list(d) for d in dists]})


def test_qpoly_soliton():
    assert run(["qpoly", "--example", "soliton"]) == (0, "z^4-2*z^3-z^2+2*z\n", "")


def test_tau_point():
    assert run(["tau"], doc([{"lambda": "0", "order": 0}])) == (0, "1\n", "")


def test_tau_from_file(tmp_path):
    path = tmp_path / "cm.json"
    path.write_text(doc([{"lambda": "0", "order": 1}], [{"lambda": "1", "order": 1}]))
    assert run(["tau", str(path)]) == (0, "x^2*exp(x)\n", "")


@pytest.mark.parametrize("example", ["calogero_moser", "soliton"])
def test_verify_passes(example):
    code, out, _ = run(["verify", "--example", example])
    assert code == 0
    assert "FAIL" not in out and "[pass] theorem_eigenvalue" in out


def test_verify_cm_reports_x_cubed():
    _, out, _ = run(["verify", "--example", "calogero_moser"])
    assert "pi: x^3\n" in out


def test_structured_output_is_deterministic():
    a = run(["verify", "--example", "soliton", "--format", "structured"])
    b = run(["verify", "--example", "soliton", "--format", "structured"])
    assert a == b
    data = json.loads(a[1])
    assert data["all_passed"] and data["command"] == "verify"
    assert data["certification"]["oracle_theorem_eigenvalue"]["samples"] == 20


def test_g_override_and_latex():
    code, out, _ = run(["factor", "--example", "calogero_moser", "--g", "x^2*exp(-x)"])
    assert code == 0 and "pi: x^4" in out
    code, out, _ = run(["latex", "--example", "calogero_moser"])
    assert code == 0 and "e^{xz}" in out


def test_wilson():
    assert run(["wilson", "--example", "calogero_moser"])[1] == "True\n"
    assert run(["wilson", "--example", "soliton"])[1] == "False\n"


def test_ad_chain_command():
    code, out, _ = run(["ad", "--example", "calogero_moser", "--m", "2"])
    assert code == 0 and "ord_Lp: 4" in out and "[pass] ad_B_vanishing" in out


@pytest.mark.parametrize("stdin", [
    "not json",
    json.dumps({"basis": []}),
    doc([{"lambda": "0"}], [{"lambda": "0", "coeff": "2"}]),
    doc([{"lambda": "0", "order": -1}]),
    doc([{"order": 1}]),
    doc([]),
])
def test_malformed_input_exits_1(stdin):
    code, out, err = run(["tau"], stdin)
    assert code == 1 and out == "" and err.startswith("error:")


def test_bad_g_exits_1():
    assert run(["lambda", "--example", "soliton", "--g", "exp(x"])[0] == 1


def test_g_that_does_not_certify_exits_1():
    # 1/Qbar needs a denominator; a constant multiplier leaves it rational
    code, _, err = run(["lambda", "--example", "calogero_moser", "--g", "1"])
    assert code == 1 and "g" in err


def test_failed_certification_exits_2():
    code, _, _ = run(["verify", "--example", "soliton", "--tol", "0"])
    assert code == 2


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "tbispec.cli", "qpoly", "--example", "calogero_moser"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "z^4-2*z^3+z^2\n"
