"""End-to-end command line flows over the documented CSV and JSON formats."""

import csv
import json
import os

import numpy as np
import pytest

from qineq import efld_true_index, read_surface_csv
from qineq.cli import main, read_input_table


def _run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture
def wage_csv(tmp_path):
    path = tmp_path / "wages.csv"
    rc = main(["gen-data", "--n", "150", "--seed", "3", "--out", str(path)])
    assert rc == 0
    return path


# ---------------------------------------------------------------------------
# gen-data and input parsing


def test_gen_data_deterministic(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    main(["gen-data", "--n", "50", "--seed", "9", "--out", str(a)])
    main(["gen-data", "--n", "50", "--seed", "9", "--out", str(b)])
    assert a.read_text() == b.read_text()
    x, y, header = read_input_table(a)
    assert header == ["years", "wage"]
    assert x.shape == (50, 1) and np.all(y > 0)
    assert np.all(x == np.floor(x)) and x.min() >= 0 and x.max() <= 40


def test_input_rejects_nonpositive_response(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2.0\n2,0.0\n3,5.0\n4,-1.0\n")
    with pytest.raises(SystemExit, match=r"rows \[2, 4\]"):
        read_input_table(path)


def test_input_rejects_ragged_and_nonnumeric(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2.0,9\n")
    with pytest.raises(SystemExit, match="row 1 has 3 fields"):
        read_input_table(path)
    path.write_text("x,y\n1,2.0\nfoo,3.0\n")
    with pytest.raises(SystemExit, match=r"non-numeric values in rows \[2\]"):
        read_input_table(path)
    path.write_text("x,y\n")
    with pytest.raises(SystemExit, match="at least one data row"):
        read_input_table(path)
    path.write_text("y\n1.0\n")
    with pytest.raises(SystemExit, match="at least one covariate"):
        read_input_table(path)


# ---------------------------------------------------------------------------
# fit


def test_fit_writes_surface_and_sidecar(tmp_path, capsys, wage_csv):
    out = tmp_path / "surface.csv"
    rc, stdout, _ = _run(capsys, [
        "fit", "--input", str(wage_csv), "--method", "IOQR",
        "--grid-size", "10", "--out", str(out),
    ])
    assert rc == 0
    assert "9 knot rows" in stdout
    surface = read_surface_csv(out)
    assert surface.coeffs.shape == (9, 2)
    assert np.all(np.diff(surface.coeffs[:, 0]) >= 0)

    meta = json.loads((tmp_path / "surface.csv.meta.json").read_text())
    assert meta["method"] == "IOQR"
    assert meta["m"] == 10
    assert meta["n"] == 150 and meta["d"] == 1
    assert meta["columns"] == ["years", "wage"]
    assert meta["noncrossing_ok"] is True
    assert len(meta["statuses"]) == 9


def test_fit_iaqr_with_explicit_tau(tmp_path, capsys, wage_csv):
    out = tmp_path / "surface.csv"
    rc, _, _ = _run(capsys, [
        "fit", "--input", str(wage_csv), "--method", "iaqr",
        "-m", "8", "--tau", "0.01", "--out", str(out),
    ])
    assert rc == 0
    meta = json.loads((tmp_path / "surface.csv.meta.json").read_text())
    assert meta["method"] == "IAQR"
    assert meta["tau"] == 0.01


# ---------------------------------------------------------------------------
# indices and curves


@pytest.fixture
def fitted(tmp_path, capsys, wage_csv):
    out = tmp_path / "surface.csv"
    main(["fit", "--input", str(wage_csv), "--method", "IOQR",
          "--grid-size", "10", "--out", str(out)])
    capsys.readouterr()
    return out


def test_indices_csv_output(tmp_path, capsys, fitted):
    out = tmp_path / "idx.csv"
    rc, _, err = _run(capsys, [
        "indices", "--surface", str(fitted), "--x", "5,20", "--x", "50",
        "--kind", "both", "--out", str(out),
    ])
    assert rc == 0
    assert "outside the fitted covariate range" in err
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["x", "kind", "method", "value", "extrapolated"]
    assert len(rows) == 6  # 3 points x 2 kinds
    assert {r["kind"] for r in rows} == {"qz", "qd"}
    assert all(r["method"] == "IOQR" for r in rows)
    flags = {float(r["x"]): r["extrapolated"] for r in rows}
    assert flags[5.0] == "false" and flags[20.0] == "false" and flags[50.0] == "true"
    for r in rows:
        v = float(r["value"])
        assert 0.0 <= v <= 1.01


def test_indices_print_mode(capsys, fitted):
    rc, stdout, _ = _run(capsys, [
        "indices", "--surface", str(fitted), "--x", "10", "--kind", "qd",
    ])
    assert rc == 0
    fields = stdout.strip().split("\t")
    assert fields[1] == "qd" and fields[2] == "IOQR"
    assert 0.0 <= float(fields[3]) <= 1.01


def test_curves_boundaries(tmp_path, capsys, fitted):
    out = tmp_path / "curve.csv"
    rc, _, _ = _run(capsys, [
        "curves", "--surface", str(fitted), "--x", "10", "--kind", "qz",
        "--n-points", "51", "--out", str(out),
    ])
    assert rc == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 51
    assert float(rows[0]["value"]) == 1.0 and float(rows[-1]["value"]) == 1.0


# ---------------------------------------------------------------------------
# true


def test_true_matches_library_value(capsys):
    rc, stdout, _ = _run(capsys, [
        "true", "--beta", "0.2", "--gamma", "0.1", "--x", "30", "--kind", "qd",
    ])
    assert rc == 0
    line = stdout.strip().splitlines()[-1]
    x, kind, tag, value = line.split("\t")
    assert kind == "qd" and tag == "TRUE"
    want = efld_true_index("qd", 0.2, 3.0)
    assert float(value) == pytest.approx(want, abs=1e-6)


def test_true_curve_files(tmp_path, capsys):
    base = tmp_path / "true_curve"
    rc, stdout, _ = _run(capsys, [
        "true", "--beta", "0.2", "--gamma", "0.1", "--x", "15",
        "--kind", "both", "--curve-out", str(base),
    ])
    assert rc == 0
    for kind in ("qz", "qd"):
        path = f"{base}.{kind}.csv"
        assert os.path.exists(path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["p", "value"] and len(rows) == 201


# ---------------------------------------------------------------------------
# simulate and selftest


def test_simulate_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "params": [[0.5, 0.2, 0.1]],
        "ns": [30],
        "reps": 2,
        "methods": ["IOQR"],
        "m": 6,
        "eval_xs": [15.0],
        "n_points": 51,
        "base_seed": 4,
    }))
    outdir = tmp_path / "results"
    rc, stdout, _ = _run(capsys, [
        "simulate", "--config", str(cfg), "--out", str(outdir),
    ])
    assert rc == 0
    assert "4 records" in stdout
    for name in ("errors.csv", "mse.csv", "mse_ratio.csv"):
        assert (outdir / name).exists()
    with open(outdir / "errors.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4

    # a different seed changes the drawn errors
    outdir2 = tmp_path / "results2"
    _run(capsys, ["simulate", "--config", str(cfg), "--out", str(outdir2),
                  "--seed", "5"])
    assert (outdir / "errors.csv").read_text() != (outdir2 / "errors.csv").read_text()


def test_selftest_passes(capsys):
    rc, stdout, _ = _run(capsys, ["selftest"])
    assert rc == 0
    assert "all checks passed" in stdout
    assert "FAIL" not in stdout


def test_parser_requires_subcommand(capsys):
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["fit"])  # missing required flags
