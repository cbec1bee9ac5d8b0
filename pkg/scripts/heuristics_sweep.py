"""Sweep the sampling ratio r_p and the coarse-mesh factor for one example
and report outer iterations, rbar and Step-(b) time.

    python scripts/heuristics_sweep.py --example 2a --n 64 --k 640
"""
import argparse
import logging
from pathlib import Path

import numpy as np

from paradiag_rom.bench import emit_csv, run_example
from paradiag_rom.rom_solver import RomConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--example", default="2a")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=640)
    ap.add_argument("--rp", type=float, nargs="+", default=[1.0, 0.5, 0.1])
    ap.add_argument("--coarse-factor", type=int, nargs="+", default=[1, 4])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/heuristics.csv"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    reports = []
    for rp in args.rp:
        for cf in args.coarse_factor:
            cfg = RomConfig(tol_rom=float(np.sqrt(1e-6)), r_p=rp, coarse_factor=cf, seed=args.seed)
            r = run_example(args.example, args.n, args.k, "rom", rom=cfg, seed=args.seed)
            reports.append(r)
            print(f"r_p={rp:<4} coarse={cf}: iters={r.iters} rbar={r.rbar:.1f} "
                  f"step-b={r.time_stepb_s:.2f}s")
    emit_csv(reports, args.out)


if __name__ == "__main__":
    main()
