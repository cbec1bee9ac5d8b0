"""Command-line entry point: ``python -m paradiag_rom --example 2a --n 64 --k 640``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .bench import SOLVERS, emit_csv, emit_diagnostics, run_table, solve_example
from .examples import EXAMPLE_IDS
from .rom_solver import RomConfig


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paradiag-rom", description=__doc__)
    p.add_argument("--example", required=True, choices=EXAMPLE_IDS)
    p.add_argument("--n", type=int, help="mesh intervals per direction (h = length / n)")
    p.add_argument("--k", type=int, help="number of time steps")
    p.add_argument("--solver", nargs="+", default=["rom"], choices=SOLVERS,
                   help="Step-(b) backend(s)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=1e-6, help="FGMRES relative tolerance")
    p.add_argument("--rp", type=float, default=0.1, help="sampled fraction of candidates")
    p.add_argument("--coarse-factor", type=int, default=4)
    p.add_argument("--rmax", type=int, default=200)
    p.add_argument("--tol-rom", type=float, default=None, help="default: sqrt(tol)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", action="store_true", help="run the example's (n, K) ladder")
    p.add_argument("--rows", type=int, default=None, help="limit the ladder to its first rows")
    p.add_argument("--diagnostics", action="store_true",
                   help="also write S2 singular values, selected d_n and indicator traces")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    tol_rom = args.tol_rom if args.tol_rom is not None else float(np.sqrt(args.tol))
    rom = RomConfig(tol_rom=tol_rom, r_p=args.rp, coarse_factor=args.coarse_factor,
                    r_max=args.rmax, seed=args.seed)
    common = dict(alpha=args.alpha, tol=args.tol, rom=rom, seed=args.seed)

    runs = []
    if args.table:
        reports = run_table(args.example, args.solver, rows=args.rows, **common)
    else:
        if args.n is None or args.k is None:
            print("--n and --k are required unless --table is given", file=sys.stderr)
            return 2
        runs = [solve_example(args.example, args.n, args.k, s, diagnostics=args.diagnostics, **common)
                for s in args.solver]
        reports = [r.report for r in runs]

    if args.out:
        emit_csv(reports, args.out)
        for run in runs:
            base = args.out if len(runs) == 1 else f"{args.out.rsplit('.', 1)[0]}_{run.report.solver}.csv"
            emit_diagnostics(run, base)
    else:
        import io
        import tempfile
        from pathlib import Path
        with tempfile.TemporaryDirectory() as d:
            sys.stdout.write(Path(emit_csv(reports, Path(d) / "out.csv")).read_text(encoding="utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
