"""Run the benchmark ladders for every example and write one CSV per table.

    python scripts/reproduce_tables.py --rows 2 --out results/
"""
import argparse
import logging
from pathlib import Path

from paradiag_rom.bench import emit_csv, run_table
from paradiag_rom.examples import EXAMPLE_IDS


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--examples", nargs="+", default=list(EXAMPLE_IDS), choices=EXAMPLE_IDS)
    ap.add_argument("--solvers", nargs="+", default=["mg1", "rom"])
    ap.add_argument("--rows", type=int, default=1, help="ladder rows per example (3 = full tables)")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    args.out.mkdir(parents=True, exist_ok=True)
    for eid in args.examples:
        reports = run_table(eid, args.solvers, rows=args.rows)
        path = emit_csv(reports, args.out / f"table_{eid}.csv")
        for r in reports:
            order = "" if r.order is None else f"{r.order:.2f}"
            rbar = "" if r.rbar is None else f"{r.rbar:.1f}"
            print(f"{eid} ({r.N},{r.K}) {r.solver:4s} err={r.error:.2e} order={order:5s} "
                  f"iters={r.iters} t={r.time_total_s:.1f}s ({r.time_stepb_s:.1f}s) rbar={rbar}")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
