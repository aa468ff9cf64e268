from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from univoque.cli import CSV_COLUMNS, EXIT_HYPOTHESIS, EXIT_OK, EXIT_PRECISION, EXIT_USAGE, main, parse_beta, parse_polynomial, scan_grid
from univoque.numerics import PrecisionContext


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def record(out: str) -> dict:
    return json.loads(out.strip().splitlines()[-1])


def test_expand_phi(capsys):
    code, out, _ = run(capsys, "expand", "--alpha", "1", "--beta", "poly:x^2-x-1", "--x", "1", "--digits", "12", "--reproducible")
    rec = record(out)
    assert code == EXIT_OK and rec["digits"] == "101010101010"
    lo, hi = (Fraction(v) for v in rec["residual"])
    assert lo <= hi and hi - lo < Fraction(1, 10**10)
    assert "timestamp" not in rec and rec["version"]


def test_expand_base_two(capsys):
    code, out, _ = run(capsys, "expand", "--alpha", "2", "--beta", "2.0", "--x", "1", "--digits", "5")
    assert code == EXIT_OK and record(out)["digits"] == "11111"
    assert "timestamp" in record(out)


def test_missing_beta_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--alpha", "1"])
    assert exc.value.code == EXIT_USAGE


def test_bad_beta_is_usage_error(capsys):
    code, _, err = run(capsys, "expand", "--alpha", "1", "--beta", "2.5")
    assert code == EXIT_USAGE and "alpha + 1" in err


def test_reproducible_output_is_byte_identical(capsys):
    args = ("dmap", "--alpha", "1", "--beta", "poly:x^3-x^2-x-1", "--digits", "20", "--reproducible")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    assert record(a)["d"] == "(110)^inf"


def test_check_sequence_and_base(capsys):
    code, out, _ = run(capsys, "check", "--alpha", "1", "--beta", "poly:x^3-x^2-x-1", "--seq", "(10)^inf")
    assert code == EXIT_OK and record(out)["verdict"]["status"] == "Certified-In"
    code, out, _ = run(capsys, "check", "--alpha", "1", "--beta", "poly:x^2-x-1")
    c = record(out)["classification"]
    assert c["w_status"] == {"kind": "Empty", "witness": 1, "equality": True}


def test_construct_tribonacci(capsys):
    code, out, _ = run(capsys, "construct", "--alpha", "1", "--beta", "poly:x^3-x^2-x-1", "--terms", "10")
    rec = record(out)
    assert code == EXIT_OK
    assert rec["M"]["terms"] == [3 * k + 1 for k in range(1, 11)]
    assert rec["verification"]["passes_to_horizon"]


def test_construct_empty_base_exits_4(capsys):
    code, _, err = run(capsys, "construct", "--alpha", "1", "--beta", "poly:x^2-x-1")
    assert code == EXIT_HYPOTHESIS


def test_construct_rate_checkpoints(capsys):
    code, out, _ = run(capsys, "construct", "--alpha", "1", "--beta", "poly:x^3-x^2-x-1", "--rate", "theta=2^n", "--checkpoints", "5")
    rows = record(out)["checkpoints"]
    assert code == EXIT_OK and len(rows) == 5 and all(r["ok"] for r in rows)


def test_mirror_and_kl(capsys):
    code, out, _ = run(capsys, "mirror", "--alpha", "1", "--t", "0", "--digits", "15")
    assert code == EXIT_OK and record(out)["digits"] == "110100110010110"
    code, _, _ = run(capsys, "mirror", "--alpha", "1", "--t", "100")
    assert code == EXIT_HYPOTHESIS
    code, out, _ = run(capsys, "kl", "--alpha", "1")
    lo, hi = record(out)["beta_enclosure"]
    assert lo.startswith("1.78723165") and Fraction(hi) - Fraction(lo) <= Fraction(1, 10**12)


def test_dimension_tree_csv(capsys):
    code, out, _ = run(capsys, "dimension", "tree", "--gamma", "1/2", "--levels", "2")
    lines = out.strip().splitlines()
    assert lines[0] == "n,S_lo,S_hi"
    assert lines[1].split(",")[1] == "0.375" and lines[2].split(",")[1] == "0.2265625"


def test_dimension_moran(capsys):
    code, out, _ = run(capsys, "dimension", "moran", "--words", "0,1", "--lam", "1/2")
    assert code == EXIT_OK and record(out)["dimension"][0] == "1"
    code, _, _ = run(capsys, "dimension", "moran", "--words", "1,10", "--lam", "1/2")
    assert code == EXIT_USAGE


def test_oracle_counts(capsys):
    code, out, _ = run(capsys, "oracle", "--alpha", "1", "--beta", "poly:x^3-x^2-x-1", "--seq", "(10)^inf", "--depth", "12")
    rec = record(out)
    assert code == EXIT_OK and rec["unique"] and rec["counts"] == [1] * 13


def test_precision_exhausted_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("UNIVOQUE_MAX_BITS", "16")
    code, _, err = run(capsys, "kl", "--alpha", "1", "--tol", "1e-100")
    assert code == EXIT_PRECISION and "precision exhausted" in err


def test_scan_tribonacci_point_and_empty_grid(capsys):
    code, out, _ = run(capsys, "scan", "--alpha", "1", "--poly", "x^3-x^2-x-1", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    row = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert row["w_status"] == "DecidedNonempty" and float(row["dim_lower"]) > 0
    code, out, _ = run(capsys, "scan", "--alpha", "1", "--start", "1.5", "--stop", "1.6", "--steps", "0")
    assert code == EXIT_OK and out == ""


def test_scan_resume_small(tmp_path, capsys):
    full, part = tmp_path / "full.jsonl", tmp_path / "part.jsonl"
    base = ["scan", "--alpha", "1", "--start", "1.5", "--stop", "1.7", "--steps", "6", "--reproducible", "--no-dimension"]
    assert main(base + ["--output", str(full)]) == EXIT_OK
    assert main(base + ["--output", str(part), "--limit", "2"]) == EXIT_OK
    assert len(part.read_text().splitlines()) == 2
    assert main(base + ["--output", str(part), "--resume"]) == EXIT_OK
    assert part.read_bytes() == full.read_bytes()
    # a different grid refuses the old checkpoint
    code = main(["scan", "--alpha", "1", "--start", "1.5", "--stop", "1.7", "--steps", "7", "--output", str(part), "--resume"])
    assert code == EXIT_USAGE


def test_scan_grid_interior():
    g = scan_grid(Fraction(3, 2), Fraction(89, 50), 100)
    assert len(g) == 100 and Fraction(3, 2) < g[0] and g[-1] < Fraction(89, 50)


def test_parse_helpers():
    assert parse_polynomial("x^3-x^2-x-1") == [1, -1, -1, -1]
    ctx = PrecisionContext()
    assert parse_beta("dvk:0", 1, ctx).beta.enclosure.lo > Fraction(178, 100)
    assert parse_beta("poly:x^2-2@1,2", 1, ctx).beta.enclosure.lo > Fraction(141, 100)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "univoque", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()
