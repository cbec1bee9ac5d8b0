"""Diagnostic data for Example 2a: singular values of the Step-(b) output,
the eigenvalues d_n picked by the greedy, and indicator vs true error.

    python scripts/diagnostics_2a.py --n 64 --k 640 --out results/diag_2a.csv
"""
import argparse
import logging
from pathlib import Path

import numpy as np

from paradiag_rom.bench import emit_csv, emit_diagnostics, solve_example


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--example", default="2a")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=640)
    ap.add_argument("--out", type=Path, default=Path("results/diag_2a.csv"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    run = solve_example(args.example, args.n, args.k, "rom", diagnostics=True)
    emit_csv([run.report], args.out)
    for f in emit_diagnostics(run, args.out):
        print(f"wrote {f}")
    for it, S2 in enumerate(run.diagnostics["S2"], start=1):
        sv = np.linalg.svd(S2, compute_uv=False)
        print(f"iteration {it}: {np.sum(sv > 1e-10)} of {args.k} singular values above 1e-10")
    for it, st in enumerate(run.diagnostics["greedy"], start=1):
        theta = run.diagnostics["spec"].theta[st.theta_in]
        edge = np.mean((theta < 0.2 * np.pi) | (theta > 1.8 * np.pi))
        print(f"iteration {it}: r={st.r}, {edge:.0%} of selected theta_n in the outer deciles")


if __name__ == "__main__":
    main()
