"""Command-line interface.

Subcommands:
  fit       fit a surface to a CSV of covariates and a positive response
  indices   integrate inequality indices from a fitted surface
  curves    sample one inequality curve from a fitted surface
  true      exact-model indices and curves
  simulate  run a Monte Carlo experiment from a JSON config
  gen-data  write a synthetic wage-style dataset
  selftest  round-trip the CSV formats end to end

Input CSV: header row, covariate columns first, response (positive) last.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile

import numpy as np

from .fld import efld_true_curve, efld_true_index
from .inequality import (
    CurveKind,
    CurveSample,
    index,
    sample_curve,
    write_curve_csv,
    write_index_csv,
)
from .methods import METHODS, fit_method
from .qr import Dataset
from .smooth import TauRule
from .simulate import SimConfig, load_config, run_experiment, write_outputs
from .surface import (
    CondQuantile,
    ProbGrid,
    check_noncrossing,
    read_surface_csv,
    write_surface_csv,
)

_KINDS = {"qz": [CurveKind.QZ], "qd": [CurveKind.QD],
          "both": [CurveKind.QZ, CurveKind.QD]}


def read_input_table(path):
    """Parse the input CSV: header, d covariate columns, positive response last.

    Returns (x matrix (n, d), y vector, column names). Any nonpositive or
    non-numeric response is a fatal error naming the offending rows
    (1-based, excluding the header).
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise SystemExit(f"error: {path}: need a header and at least one data row")
    header = rows[0]
    if len(header) < 2:
        raise SystemExit(f"error: {path}: need at least one covariate column and a response")
    body = rows[1:]
    data = np.empty((len(body), len(header)))
    bad_numeric = []
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise SystemExit(f"error: {path}: row {i + 1} has {len(r)} fields, expected {len(header)}")
        try:
            data[i] = [float(v) for v in r]
        except ValueError:
            bad_numeric.append(i + 1)
    if bad_numeric:
        raise SystemExit(f"error: {path}: non-numeric values in rows {bad_numeric}")
    y = data[:, -1]
    bad = (np.nonzero(~(y > 0))[0] + 1).tolist()
    if bad:
        raise SystemExit(
            f"error: {path}: response column {header[-1]!r} must be strictly "
            f"positive; offending rows {bad}"
        )
    return data[:, :-1], y, header


def _sidecar_path(surface_path: str) -> str:
    return surface_path + ".meta.json"


def cmd_fit(args) -> int:
    x, y, header = read_input_table(args.input)
    data = Dataset.from_xy(x, y)
    grid = ProbGrid(args.grid_size)
    fit = fit_method(args.method, data, grid, tau=args.tau, tau_rule=TauRule(args.tau_rule))
    write_surface_csv(fit.surface, args.out)

    lo = x.min(axis=0)
    hi = x.max(axis=0)
    corners = [list(lo), list(hi)] if x.shape[1] == 1 else \
        [[float(v) for v in c] for c in
         np.array(np.meshgrid(*zip(lo, hi))).T.reshape(-1, x.shape[1])]
    report = check_noncrossing(fit.surface, corners)
    meta = {
        "method": args.method.upper(),
        "m": grid.m,
        "tau": args.tau,
        "tau_rule": args.tau_rule,
        "n": data.n,
        "d": data.d,
        "columns": header,
        "covariate_min": [float(v) for v in lo],
        "covariate_max": [float(v) for v in hi],
        "statuses": [s.value for s in fit.statuses],
        "noncrossing_ok": report.ok,
        "n_violations": len(report.violations),
    }
    with open(_sidecar_path(args.out), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out} ({grid.m - 1} knot rows) and {_sidecar_path(args.out)}")
    if not fit.ok:
        print("warning: some knots did not solve to optimality; see sidecar statuses",
              file=sys.stderr)
    return 0


def _parse_xs(values, d):
    xs = []
    for chunk in values:
        for tok in chunk.split(","):
            tok = tok.strip()
            if tok:
                xs.append(float(tok))
    if d == 1:
        return [[v] for v in xs]
    if len(xs) % d != 0:
        raise SystemExit(f"error: --x values do not group into vectors of length {d}")
    return [xs[i:i + d] for i in range(0, len(xs), d)]


def cmd_indices(args) -> int:
    surface = read_surface_csv(args.surface)
    meta = {}
    sidecar = _sidecar_path(args.surface)
    if os.path.exists(sidecar):
        with open(sidecar, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    method = meta.get("method", "UNKNOWN")
    lo = meta.get("covariate_min")
    hi = meta.get("covariate_max")
    xs = _parse_xs(args.x, surface.d)
    rows = []
    for xv in xs:
        extrapolated = False
        if lo is not None and hi is not None:
            extrapolated = any(v < l or v > h for v, l, h in zip(xv, lo, hi))
            if extrapolated:
                print(f"warning: x={xv} lies outside the fitted covariate range",
                      file=sys.stderr)
        for kind in _KINDS[args.kind]:
            iv = index(kind, CondQuantile(surface, xv), args.n_points, method=method)
            x_out = xv[0] if len(xv) == 1 else xv
            rows.append((x_out, iv, {"extrapolated": str(extrapolated).lower()}))
    if args.out:
        write_index_csv(rows, args.out, extra_fields=("extrapolated",))
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        for x_out, iv, extra in rows:
            print(f"{x_out}\t{iv.kind.value}\t{iv.method}\t{iv.value:.6f}"
                  f"\t{extra['extrapolated']}")
    return 0


def cmd_curves(args) -> int:
    surface = read_surface_csv(args.surface)
    xs = _parse_xs([args.x], surface.d)
    if len(xs) != 1:
        raise SystemExit("error: curves takes exactly one covariate vector")
    kind = CurveKind(args.kind)
    cs = sample_curve(kind, CondQuantile(surface, xs[0]), args.n_points)
    if args.out:
        write_curve_csv(cs, args.out)
        print(f"wrote {args.out} ({cs.ps.size} rows)")
    else:
        for p, v in zip(cs.ps, cs.values):
            print(f"{p:.6f}\t{v:.6f}")
    return 0


def cmd_true(args) -> int:
    rows = []
    for kind in _KINDS[args.kind]:
        gx = args.gamma * args.x
        value = efld_true_index(kind, args.beta, gx, args.n_points)
        rows.append((args.x, kind, value))
        if args.curve_out:
            ps = np.linspace(0.0, 1.0, args.n_points)
            cs = CurveSample(kind, ps, efld_true_curve(kind, args.beta, gx, ps))
            path = args.curve_out if args.kind != "both" else \
                f"{args.curve_out}.{kind.value}.csv"
            write_curve_csv(cs, path)
            print(f"wrote {path}")
    for x, kind, value in rows:
        print(f"{x}\t{kind.value}\tTRUE\t{value:.6f}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg = SimConfig(**{**_cfg_dict(cfg), "workers": args.workers})
    if args.seed is not None:
        cfg = SimConfig(**{**_cfg_dict(cfg), "base_seed": args.seed})
    result = run_experiment(cfg)
    write_outputs(result, args.out)
    n_rec = len(result.records)
    print(f"wrote errors.csv, mse.csv, mse_ratio.csv under {args.out} "
          f"({n_rec} records, {result.n_failed} failed)")
    return 0


def _cfg_dict(cfg: SimConfig) -> dict:
    return {name: getattr(cfg, name) for name in SimConfig.__dataclass_fields__}


def cmd_gen_data(args) -> int:
    rng = np.random.default_rng(args.seed)
    years = rng.integers(0, 41, size=args.n)
    z = args.intercept + args.slope * years + rng.normal(0.0, args.noise_sd, size=args.n)
    wage = np.exp(z)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["years", "wage"])
        for yr, wg in zip(years, wage):
            w.writerow([int(yr), format(wg, ".17g")])
    print(f"wrote {args.out} ({args.n} rows)")
    return 0


def cmd_selftest(args) -> int:
    failures = 0

    def check(label, ok):
        nonlocal failures
        print(f"[selftest] {label}: {'PASS' if ok else 'FAIL'}")
        failures += not ok

    with tempfile.TemporaryDirectory() as tmp:
        data_path = os.path.join(tmp, "data.csv")
        surf_path = os.path.join(tmp, "surface.csv")
        idx_path = os.path.join(tmp, "indices.csv")
        crv_path = os.path.join(tmp, "curve.csv")

        rc = main(["gen-data", "--n", "200", "--seed", "7", "--out", data_path])
        check("gen-data writes a parseable table", rc == 0)
        x, y, header = read_input_table(data_path)
        check("input schema (covariates then positive response)",
              x.shape == (200, 1) and np.all(y > 0) and header == ["years", "wage"])

        rc = main(["fit", "--input", data_path, "--method", "IOQR",
                   "--grid-size", "10", "--out", surf_path])
        surface = read_surface_csv(surf_path)
        check("fit writes surface CSV plus sidecar",
              rc == 0 and surface.grid.m == 10
              and os.path.exists(_sidecar_path(surf_path)))
        back = read_surface_csv(surf_path)
        check("surface CSV round trip is lossless",
              np.array_equal(back.coeffs, surface.coeffs))

        rc = main(["indices", "--surface", surf_path, "--x", "5,20",
                   "--kind", "both", "--out", idx_path])
        with open(idx_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        check("indices CSV has the documented columns",
              rc == 0 and rows and
              list(rows[0]) == ["x", "kind", "method", "value", "extrapolated"])
        iv = index(CurveKind.QD, CondQuantile(surface, [5.0]), 201, method="IOQR")
        got = [float(r["value"]) for r in rows
               if r["kind"] == "qd" and float(r["x"]) == 5.0]
        check("indices CSV round trips the computed value",
              len(got) == 1 and abs(got[0] - iv.value) < 1e-15)

        rc = main(["curves", "--surface", surf_path, "--x", "5",
                   "--kind", "qd", "--n-points", "51", "--out", crv_path])
        with open(crv_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        check("curve CSV parses under the p,value schema",
              rc == 0 and list(rows[0]) == ["p", "value"] and len(rows) == 51)
        vals = np.array([float(r["value"]) for r in rows])
        ps = np.array([float(r["p"]) for r in rows])
        check("curve boundary conventions in the file",
              ps[0] == 0.0 and ps[-1] == 1.0 and vals[0] == 1.0 and vals[-1] == 0.0)

    print(f"[selftest] {'all checks passed' if failures == 0 else f'{failures} checks FAILED'}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qineq", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a coefficient surface to a CSV dataset")
    p.add_argument("--input", required=True, help="CSV: covariates then positive response")
    p.add_argument("--method", default="IOQR", choices=list(METHODS)
                   + [m.lower() for m in METHODS])
    p.add_argument("--grid-size", "-m", type=int, default=20, dest="grid_size",
                   help="order-grid resolution m (knots at j/m)")
    p.add_argument("--tau", type=float, default=None,
                   help="smoothing scale for IAQR (default: data-driven rule)")
    p.add_argument("--tau-rule", default="iqr", choices=["iqr", "sd"],
                   help="data-driven tau rule when --tau is omitted")
    p.add_argument("--out", required=True, help="output surface CSV path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("indices", help="inequality indices from a fitted surface")
    p.add_argument("--surface", required=True, help="surface CSV from 'fit'")
    p.add_argument("--x", action="append", required=True,
                   help="covariate value(s); repeatable or comma separated")
    p.add_argument("--kind", default="both", choices=["qz", "qd", "both"])
    p.add_argument("--n-points", type=int, default=201, dest="n_points")
    p.add_argument("--out", default=None, help="output CSV (default: print)")
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("curves", help="sample one inequality curve from a surface")
    p.add_argument("--surface", required=True)
    p.add_argument("--x", required=True, help="one covariate vector (comma separated)")
    p.add_argument("--kind", default="qd", choices=["qz", "qd"])
    p.add_argument("--n-points", type=int, default=201, dest="n_points")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("true", help="exact-model index (and optional curve)")
    p.add_argument("--kind", default="both", choices=["qz", "qd", "both"])
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--n-points", type=int, default=201, dest="n_points")
    p.add_argument("--curve-out", default=None, help="also write the curve CSV here")
    p.set_defaults(func=cmd_true)

    p = sub.add_parser("simulate", help="Monte Carlo experiment from a JSON config")
    p.add_argument("--config", required=True, help="JSON file of SimConfig fields")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None, help="process count cap")
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-data", help="synthetic wage-style dataset")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intercept", type=float, default=2.0)
    p.add_argument("--slope", type=float, default=0.03)
    p.add_argument("--noise-sd", type=float, default=0.5, dest="noise_sd")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("selftest", help="round-trip the CSV formats")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
