"""End-to-end command-line walkthrough on synthetic wage-style data.

Drives the installed ``qineq`` CLI exactly as a shell user would:
generate a dataset, fit a non-crossing surface, integrate inequality
indices at chosen experience levels, and sample one curve.
"""

import subprocess
import sys
from pathlib import Path

OUT = Path(__file__).parent / "output" / "wage"


def run(*args):
    cmd = [sys.executable, "-m", "qineq.cli", *args]
    print(f"\n$ qineq {' '.join(args)}")
    proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
    if proc.stdout:
        print(proc.stdout.rstrip())
    if proc.stderr:
        print(proc.stderr.rstrip(), file=sys.stderr)
    if proc.returncode != 0:
        raise SystemExit(f"command failed with rc={proc.returncode}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    data = OUT / "wages.csv"
    surface = OUT / "surface.csv"

    print("=== 1. synthesize a wage-style dataset ===")
    run("gen-data", "--n", "400", "--seed", "1", "--out", str(data))
    print(f"first lines of {data}:")
    print("\n".join(data.read_text().splitlines()[:4]))

    print("\n=== 2. fit a smoothed isotonic surface ===")
    run("fit", "--input", str(data), "--method", "iaqr", "-m", "20",
        "--out", str(surface))

    print("\n=== 3. inequality indices along the experience range ===")
    run("indices", "--surface", str(surface), "--x", "5,20,35",
        "--kind", "both")

    print("\n=== 4. one full curve at 20 years of experience ===")
    run("curves", "--surface", str(surface), "--x", "20", "--kind", "qd",
        "--n-points", "101", "--out", str(OUT / "qd_curve.csv"))
    print(f"curve rows written to {OUT / 'qd_curve.csv'}")

    print("\n=== 5. formats self-check ===")
    run("selftest")


if __name__ == "__main__":
    main()
