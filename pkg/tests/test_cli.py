import csv
import io
import json
import math

import pytest

from funceq import PeriodicMap
from funceq.cli import main, parse_pspec, render_pspec


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_exit(*argv):
    """Exit code for invocations argparse itself rejects."""
    try:
        return run(*argv)[0]
    except SystemExit as exc:
        return exc.code


# -- PSpec -------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, p",
    [
        ("const:1", PeriodicMap(1.0)),
        ("const:-2.5", PeriodicMap(-2.5)),
        ("fourier:1;0.5,0", PeriodicMap(1.0, ((0.5, 0.0),))),
        ("fourier: 2 ; 0,0 ; 1, 0", PeriodicMap(2.0, ((0.0, 0.0), (1.0, 0.0)))),
        ("fourier:0.25", PeriodicMap(0.25)),
    ],
)
def test_parse_pspec(text, p):
    assert parse_pspec(text) == p


@pytest.mark.parametrize(
    "text",
    ["", "1.0", "const:", "const:abc", "fourier:1;", "fourier:1;0.5", "fourier:1;a,b", "sine:1", "fourier:1;1,2,3", "const:nan"],
)
def test_parse_pspec_rejects(text):
    with pytest.raises(ValueError):
        parse_pspec(text)


@pytest.mark.parametrize(
    "p",
    [PeriodicMap(0.1), PeriodicMap(1 / 3, ((math.pi, -1e-300), (2.0 / 7.0, 0.0))), PeriodicMap(-0.0, ((1e20, 5e-324),))],
)
def test_pspec_round_trip(p):
    assert parse_pspec(render_pspec(p)) == p
    assert render_pspec(parse_pspec(render_pspec(p))) == render_pspec(p)


# -- classify ----------------------------------------------------------------------


def test_classify_critical():
    code, out = run("classify", "--R", "1", "--k", "2")
    d = json.loads(out)
    assert code == 0
    assert list(d) == ["R", "k", "c", "regime", "monotone_phi", "continuity_rule", "c1_rule"]
    assert d["regime"] == "Critical" and d["monotone_phi"] is True and d["c"] == 0.0


def test_classify_flexible_and_rigid():
    assert json.loads(run("classify", "--R", "1", "--k", "5")[1])["regime"] == "SupercriticalFlexible"
    d = json.loads(run("classify", "--R", "1", "--k", "4")[1])
    assert d["regime"] == "SupercriticalRigid" and d["monotone_phi"] is False
    assert d["c1_rule"] == "constant_p_antisymmetric"


@pytest.mark.parametrize("argv", [("--R", "1", "--k", "0"), ("--R", "-1", "--k", "1"), ("--R", "1"), ("--R", "x", "--k", "1")])
def test_classify_bad_flags_exit_2(argv):
    assert run_exit("classify", *argv) == 2


# -- sample ------------------------------------------------------------------------


def _parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x", "s", "f", "f_prime", "residual"]
    return [dict(zip(rows[0], map(float, r))) for r in rows[1:]]


def test_sample_phi0_csv(tmp_path):
    path = tmp_path / "out.csv"
    code, _ = run("sample", "--R", "1", "--k", "2", "--p", "const:1", "--branch", "right",
                  "--smin", "-5", "--smax", "3", "--n", "100", "--out", str(path))
    assert code == 0
    text = path.read_text()
    assert text.endswith("\n") and '"' not in text
    rows = _parse_csv(text)
    assert len(rows) == 100
    for r in rows:
        assert r["f"] == pytest.approx(1.0 / r["x"], rel=1e-14)
        assert r["f_prime"] == pytest.approx(-1.0 / r["x"] ** 2, rel=1e-13)
        assert abs(r["residual"]) <= 1e-10 * (1 + abs(r["f"]))


def test_sample_left_branch_residuals():
    code, out = run("sample", "--R", "1", "--k", "3", "--p", "fourier:1;0.3,0.1", "--branch", "left",
                    "--smin", "-10", "--smax", "8", "--n", "200")
    assert code == 0
    for r in _parse_csv(out):
        assert abs(r["residual"]) <= 1e-10 * (1 + abs(r["f"]))


def test_sample_numbers_round_trip():
    _, out = run("sample", "--R", "0.7", "--k", "3.3", "--p", "fourier:0.2;0.3,0.1", "--n", "5")
    first = out.splitlines()[1].split(",")
    assert all(v == format(float(v), ".17g") for v in first)


def test_sample_json():
    code, out = run("sample", "--R", "1", "--k", "3", "--p", "const:1", "--n", "4", "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["rows"]) == 4 and set(d["rows"][0]) == {"x", "s", "f", "f_prime", "residual"}


@pytest.mark.parametrize(
    "extra",
    [("--smin", "-100"), ("--smax", "9.1"), ("--n", "1"), ("--smin", "2", "--smax", "1"), ("--p", "fourier:1;")],
)
def test_sample_bad_flags_exit_2(extra):
    argv = ["sample", "--R", "1", "--k", "3", "--p", "const:1"] + list(extra)
    assert run_exit(*argv) == 2


# -- verify ------------------------------------------------------------------------


def test_verify_residual_pass():
    code, out = run("verify", "--suite", "residual", "--trials", "1000", "--seed", "42", "--tol", "1e-10")
    d = json.loads(out)
    assert list(d) == ["suite", "trials", "seed", "tol", "worst_error", "worst_inputs", "pass"]
    assert d["pass"] is True and code == 0


@pytest.mark.parametrize("suite, trials, seed, tol", [("witness", 50, 3, "0"), ("ode", 100, 9, "1e-8")])
def test_verify_examples(suite, trials, seed, tol):
    code, out = run("verify", "--suite", suite, "--trials", str(trials), "--seed", str(seed), "--tol", tol)
    assert code == 0 and json.loads(out)["pass"] is True


def test_verify_failure_exit_1():
    code, out = run("verify", "--suite", "derivative", "--trials", "20", "--seed", "1", "--tol", "1e-15")
    assert code == 1 and json.loads(out)["pass"] is False


def test_verify_unknown_suite_exit_2():
    assert run_exit("verify", "--suite", "bogus") == 2


def test_verify_byte_identical():
    argv = ("verify", "--suite", "linearity", "--trials", "30", "--seed", "5")
    assert run(*argv)[1] == run(*argv)[1]


# -- witness -----------------------------------------------------------------------


def test_witness_cmd():
    code, out = run("witness", "--R", "1", "--k", "2", "--p", "fourier:1;0.5,0")
    d = json.loads(out)
    assert code == 0 and d["f_high"] > d["f_low"] and d["x_low"] < d["x_high"]
    assert d["f_high_check"] == d["f_high"] and d["verified"] is True


@pytest.mark.parametrize("argv", [("--k", "2", "--p", "const:1"), ("--k", "3", "--p", "fourier:1;0.5,0")])
def test_witness_cmd_exit_2(argv):
    assert run_exit("witness", "--R", "1", *argv) == 2


# -- report-c1 ---------------------------------------------------------------------


def test_report_c1_smooth_k4():
    code, out = run("report-c1", "--R", "1", "--k", "4", "--p-right", "const:1", "--p-left", "const:-1")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "C1WithDerivative" and d["derivative_at_boundary"] == 1.0
    assert abs(d["probe"]["right"][-1]["fd_slope"] - 1.0) <= 1e-4
    assert abs(d["probe"]["left"][-1]["fd_slope"] - 1.0) <= 1e-4


def test_report_c1_flexible_and_oscillating():
    d = json.loads(run("report-c1", "--R", "1", "--k", "5", "--p-right", "fourier:1;0.2,0", "--p-left", "const:1")[1])
    assert d["verdict"] == "C1WithDerivative" and d["derivative_at_boundary"] == 0.0
    d = json.loads(run("report-c1", "--R", "1", "--k", "3", "--p-right", "fourier:1;0.2,0", "--p-left", "const:1")[1])
    assert d["verdict"] == "NotC1" and d["reason"] == "OscillatingDerivative"


def test_report_c1_ladder_flag():
    d = json.loads(run("report-c1", "--R", "1", "--k", "3", "--p-right", "const:1", "--p-left", "const:1",
                       "--ladder", "1e-2,1e-4,1e-30")[1])
    assert [r["delta"] for r in d["probe"]["right"]] == [1e-2, 1e-4, 1e-30]
    assert d["probe"]["right"][-1]["error"] is not None


@pytest.mark.parametrize("k", ["2", "1"])
def test_report_c1_exit_2(k):
    assert run_exit("report-c1", "--R", "1", "--k", k, "--p-right", "const:1", "--p-left", "const:1") == 2


def test_report_c1_bad_ladder_exit_2():
    assert run_exit("report-c1", "--R", "1", "--k", "3", "--p-right", "const:1", "--p-left", "const:1",
                    "--ladder", "1e-3,1e-2") == 2


# -- config ------------------------------------------------------------------------


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("R = 1\nk = 5\n")
    d = json.loads(run("--config", str(cfg), "classify")[1])
    assert d["regime"] == "SupercriticalFlexible"
    d = json.loads(run("--config", str(cfg), "classify", "--k", "2")[1])
    assert d["regime"] == "Critical"


def test_config_with_pspec_keys(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[funceq]\nR = 1\nk = 4\np-right = const:1\np_left = const:-1\n")
    d = json.loads(run("--config", str(cfg), "report-c1")[1])
    assert d["derivative_at_boundary"] == 1.0


def test_missing_config_exit_2(tmp_path):
    assert run_exit("--config", str(tmp_path / "missing.ini"), "classify") == 2
