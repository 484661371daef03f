"""Tests for the command-line interface (driven in-process through main)."""

import json
import subprocess
import sys

import pytest

from lyness.cli import main


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def test_certify_full_run(capsys):
    assert main(["certify"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["overallPass"] is True
    assert len(doc["steps"]) == 24
    assert doc["counts"] == {"delta2Numerator": 277, "eq16": 233, "eq17": 371}
    assert "elapsedMs" in doc["steps"][0]


def test_certify_single_groups(capsys):
    assert main(["certify", "--step", "identity"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [s["step"] for s in doc["steps"]] == ["delta1-identity"]

    assert main(["certify", "--step", "q1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["steps"]) == 5
    assert all(s["step"].startswith("q1-") for s in doc["steps"])


def test_certify_no_timing_is_byte_identical(capsys):
    assert main(["certify", "--no-timing"]) == 0
    first = capsys.readouterr().out
    assert main(["certify", "--no-timing"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "elapsedMs" not in first


def test_certify_threads_agree_with_serial(capsys):
    assert main(["certify", "--no-timing"]) == 0
    serial = capsys.readouterr().out
    assert main(["certify", "--no-timing", "--threads", "4"]) == 0
    threaded = capsys.readouterr().out
    assert serial == threaded


def test_certify_json_file_plus_text_table(tmp_path, capsys):
    target = tmp_path / "certificate.json"
    assert main(["certify", "--json", str(target), "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "overall: PASS" in out
    assert "q3-case-above-diagonal" in out
    doc = json.loads(target.read_text())
    assert doc["overallPass"] is True


# ---------------------------------------------------------------------------
# identity
# ---------------------------------------------------------------------------


def test_identity_delta1(capsys):
    assert main(["identity", "--which", "delta1"]) == 0
    out = capsys.readouterr().out
    assert "holds" in out
    assert "cross-difference monomials: 0" in out


def test_identity_delta2_denominator(capsys):
    assert main(["identity", "--which", "delta2-denominator"]) == 0
    out = capsys.readouterr().out
    assert "matches the factored product" in out
    assert "constant 1/1" in out


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_convergent_instance(capsys):
    code = main(["simulate", "--p", "20", "--q", "4", "--xm1", "1", "--x0", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: converged" in out
    assert "equilibrium: 6.216990566" in out
    assert "descent: ok" in out


def test_simulate_max_iters_exceeded_fails(capsys):
    code = main(["simulate", "--p", "20", "--q", "4", "--xm1", "1", "--x0", "2",
                 "--max-iters", "3"])
    out = capsys.readouterr().out
    assert code == 1
    assert "verdict: max-iters-exceeded" in out


def test_simulate_descent_not_applicable_when_q_at_least_p(capsys):
    code = main(["simulate", "--p", "1", "--q", "2", "--xm1", "1", "--x0", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "descent: not applicable (q >= p)" in out


def test_simulate_exact_mode_runs(capsys):
    code = main(["simulate", "--p", "20", "--q", "4", "--xm1", "1", "--x0", "2",
                 "--exact", "--max-iters", "8"])
    out = capsys.readouterr().out
    assert code == 1  # 8 exact steps cannot reach the default tolerance
    assert "verdict: max-iters-exceeded" in out


def test_simulate_writes_csv(tmp_path, capsys):
    target = tmp_path / "trace.csv"
    code = main(["simulate", "--p", "20", "--q", "4", "--xm1", "1", "--x0", "2",
                 "--csv", str(target)])
    capsys.readouterr()
    assert code == 0
    lines = target.read_text().strip().split("\n")
    assert lines[0] == "n,x_prev,x_curr,g"
    assert len(lines) > 2


def test_simulate_rejects_nonpositive_seed(capsys):
    code = main(["simulate", "--p", "2", "--q", "1", "--xm1", "0", "--x0", "1"])
    err = capsys.readouterr().err
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------


def test_regions_showcase_point(capsys):
    assert main(["regions", "--p", "20", "--q", "4"]) == 0
    out = capsys.readouterr().out
    assert "flags: (none)" in out
    assert out.count("not satisfied") == 5


def test_regions_small_point(capsys):
    assert main(["regions", "--p", "1", "--q", "2"]) == 0
    out = capsys.readouterr().out
    assert "flags: abcde" in out


def test_regions_not_applicable_at_q_one(capsys):
    assert main(["regions", "--p", "2", "--q", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count(": not applicable [") == 2


# ---------------------------------------------------------------------------
# ggrid
# ---------------------------------------------------------------------------


def test_ggrid_stdout(capsys):
    assert main(["ggrid", "--alpha-tilde", "2", "--window", "1,2,1,2",
                 "--res", "3"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "x,y,g"
    assert len(lines) == 10


def test_ggrid_csv_file(tmp_path, capsys):
    target = tmp_path / "grid.csv"
    assert main(["ggrid", "--alpha-tilde", "2", "--window", "0.5,5,0.5,5",
                 "--res", "21", "--csv", str(target)]) == 0
    out = capsys.readouterr().out
    assert "wrote 441 rows" in out
    lines = target.read_text().strip().split("\n")
    assert len(lines) == 442


def test_ggrid_invalid_window_is_usage_error(capsys):
    code = main(["ggrid", "--alpha-tilde", "2", "--window", "0,1,0.5,1",
                 "--res", "5"])
    err = capsys.readouterr().err
    assert code == 2
    assert "strictly positive" in err


# ---------------------------------------------------------------------------
# argument errors
# ---------------------------------------------------------------------------


def test_bad_rational_is_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--p", "abc", "--q", "1", "--xm1", "1", "--x0", "1"])
    assert exc.value.code == 2
    assert "not a rational number" in capsys.readouterr().err


def test_bad_window_shape_is_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ggrid", "--alpha-tilde", "2", "--window", "1,2,3", "--res", "5"])
    assert exc.value.code == 2


def test_missing_subcommand_is_argparse_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lyness", "regions", "--p", "20", "--q", "4"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "flags: (none)" in proc.stdout
