"""A small Monte Carlo comparison of the estimators.

Runs the seeded harness at demo scale (two parameter sets, two sample
sizes, 50 replicates, four methods), prints the MSE and best-method
ratio tables, and writes the three CSV outputs.
"""

import time
from pathlib import Path

from qineq import SimConfig, run_experiment, write_outputs


def main():
    out = Path(__file__).parent / "output" / "mc"
    cfg = SimConfig(
        params=((0.5, 0.2, 0.1), (0.5, 0.5, 0.5)),
        ns=(50, 100),
        reps=50,
        methods=("BK", "IOQR", "IAQR", "CQR"),
        eval_xs=(1.0, 15.0, 30.0),
    )
    print("config:", cfg)
    t0 = time.time()
    result = run_experiment(cfg)
    print(f"\n{len(result.records)} error records in {time.time() - t0:.1f}s "
          f"({result.n_failed} failed)")

    print("\n=== MSE of the qDI estimate at x = 30 ===")
    print(f"  {'params':<16} {'n':>4}  " +
          "  ".join(f"{m:>9}" for m in cfg.methods))
    for i in range(len(cfg.params)):
        pid = cfg.param_id(i)
        for n in cfg.ns:
            cells = {c.method: c.mse for c in result.mse
                     if c.param_id == pid and c.n == n
                     and c.x == 30.0 and c.kind == "qd"}
            row = "  ".join(f"{cells[m]:9.2e}" for m in cfg.methods)
            print(f"  {pid:<16} {n:>4}  {row}")

    print("\n=== Ratio to the best method (1.00 = best) ===")
    for i in range(len(cfg.params)):
        pid = cfg.param_id(i)
        for n in cfg.ns:
            cells = {c.method: c.ratio for c in result.ratios
                     if c.param_id == pid and c.n == n
                     and c.x == 30.0 and c.kind == "qd"}
            row = "  ".join(f"{cells[m]:9.2f}" for m in cfg.methods)
            print(f"  {pid:<16} {n:>4}  {row}")

    write_outputs(result, out)
    print(f"\nerrors.csv, mse.csv, mse_ratio.csv written to {out}/")


if __name__ == "__main__":
    main()
