"""Experiment driver: assemble an example, solve the all-at-once system with
FGMRES + ParaDIAG, and report error, iterations, timings and basis sizes."""
from __future__ import annotations

import csv
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .all_at_once import (AllAtOnceSystem, apply_global_operator, convergence_order,
                          sequential_solve, spacetime_error)
from .core_linalg import to_block
from .discretization import assemble_rhs_block, assemble_spatial_operator
from .examples import ExampleSpec, exact_solution_block, get_example
from .fgmres import FgmresConfig, fgmres_solve
from .paradiag import apply_preconditioner, build_spec
from .rom_solver import ROMStepB, RomConfig
from .stepb_fom import DirectStepB, MG1StepB

SOLVERS = ("direct", "mg1", "rom")
CSV_COLUMNS = ("example", "N", "K", "solver", "alpha", "tol", "seed", "error", "order", "iters",
               "time_total_s", "time_stepb_s", "rbar", "vcycles_avg", "imag_residue")
TIME_COLUMNS = ("time_total_s", "time_stepb_s")
REFERENCE_REFINEMENT = 4


@dataclass
class SolveReport:
    example: str
    N: int
    K: int
    solver: str
    alpha: float
    tol: float
    seed: int
    error: Optional[float]
    iters: int
    time_total_s: float
    time_stepb_s: float
    rbar: Optional[float] = None
    vcycles_avg: Optional[float] = None
    imag_residue: float = 0.0
    order: Optional[float] = None
    relres: float = np.nan
    converged: bool = True
    error_kind: str = "l2"

    def row(self) -> dict:
        d = asdict(self)
        return {c: d[c] for c in CSV_COLUMNS}


@dataclass
class RunResult:
    report: SolveReport
    U: np.ndarray
    precond_stats: list
    diagnostics: dict = field(default_factory=dict)


class _Capture:
    """Wraps a Step-(b) backend and keeps each S2 it produces."""

    def __init__(self, inner):
        self.inner = inner
        self.name = inner.name
        self.blocks = []

    def solve_all(self, S1, spec, L):
        S2, st = self.inner.solve_all(S1, spec, L)
        self.blocks.append(S2.copy())
        return S2, st


def reference_solution(ex: ExampleSpec, n: int, K: int):
    """Exact solution block, or for examples without one (1b) the sequential
    solution on a grid refined ``REFERENCE_REFINEMENT`` times in space and
    time, injected back to the coarse nodes.  Returns None for 2d."""
    grid, tgrid = ex.grids(n, K)
    Ue = exact_solution_block(ex.id, grid, tgrid)
    if Ue is not None or ex.id != "1b":
        return Ue
    m = REFERENCE_REFINEMENT
    fg, ftg = ex.grids(m * n, m * K)
    Lf = assemble_spatial_operator(ex.problem, fg)
    Uf = sequential_solve(AllAtOnceSystem(Lf, ftg.tau, assemble_rhs_block(ex.problem, fg, ftg)))
    # coarse node i (1-based) sits at fine node m*i; coarse step k at fine step m*k
    return Uf[m - 1::m, m - 1::m]


def make_backend(solver: str, ex: ExampleSpec, N_interior: int, rom: RomConfig):
    if solver == "direct":
        return DirectStepB()
    if solver == "mg1":
        return MG1StepB(ex.dim, N_interior, ex.smoother)
    if solver == "rom":
        return ROMStepB(ex.dim, N_interior, rom, ex.smoother)
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def solve_example(example_id: str, n: int, K: int, solver: str = "rom", alpha: float = 0.01,
                  tol: float = 1e-6, rom: Optional[RomConfig] = None, seed: int = 0,
                  diagnostics: bool = False, max_iter: int = 100) -> RunResult:
    """Full run; ``n`` is the number of mesh intervals per direction."""
    ex = get_example(example_id)
    if rom is None:
        rom = RomConfig(tol_rom=float(np.sqrt(tol)), seed=seed)
    grid, tgrid = ex.grids(n, K)
    L = assemble_spatial_operator(ex.problem, grid)
    system = AllAtOnceSystem(L, tgrid.tau, assemble_rhs_block(ex.problem, grid, tgrid))
    spec = build_spec(alpha, K, tgrid.tau)
    backend = make_backend(solver, ex, grid.N, rom)
    if diagnostics:
        if solver == "rom":
            backend.capture_exact = True
        backend = _Capture(backend)

    stepb_time = 0.0

    def precondition(v):
        nonlocal stepb_time
        z, st = apply_preconditioner(v, spec, L, backend)
        stepb_time += st["time_stepb"]
        return z, st

    t0 = time.perf_counter()
    res = fgmres_solve(lambda v: apply_global_operator(system, v), precondition,
                       system.rhs_vector(), FgmresConfig(tol, max_iter))
    total = time.perf_counter() - t0
    U = to_block(res.x, K)

    Uref = reference_solution(ex, n, K)
    if Uref is not None:
        error = spacetime_error(U, Uref, grid.h, grid.dim, tgrid.tau)
        kind = "l2" if ex.has_exact else "l2_reference"
    else:
        error, kind = res.relres, "relres"

    stats = res.precond_stats
    rbar = vc = None
    if solver == "rom":
        rbar = float(np.mean([s["r"] for s in stats]))
        cycles = [c for s in stats for c in s["fom_cycles"]]
        vc = float(np.mean(cycles)) if cycles and ex.dim == 2 else None
    elif solver == "mg1":
        vc = 1.0
    report = SolveReport(example_id, n, K, solver, alpha, tol, rom.seed,
                         error, res.iters, total, stepb_time, rbar, vc,
                         max((s["imag_residue"] for s in stats), default=0.0),
                         relres=res.relres, converged=res.converged, error_kind=kind)
    out = RunResult(report, U, stats)
    if diagnostics:
        out.diagnostics = {"S2": backend.blocks, "spec": spec, "stats": stats,
                           "greedy": getattr(backend.inner, "history", [])}
    return out


def run_example(example_id: str, n: int, K: int, solver: str = "rom", **kwargs) -> SolveReport:
    return solve_example(example_id, n, K, solver, **kwargs).report


def run_table(example_id: str, solvers: Sequence[str] = ("mg1", "rom"), rows: Optional[int] = None,
              **kwargs) -> list[SolveReport]:
    """Run the example's (n, K) ladder for each solver and fill in orders."""
    ladder = get_example(example_id).ladder[:rows]
    reports = []
    for solver in solvers:
        prev = None
        for n, K in ladder:
            rep = run_example(example_id, n, K, solver, **kwargs)
            if prev is not None and rep.error_kind != "relres":
                rep.order = add_order(prev.error, rep.error)
            reports.append(rep)
            prev = rep
    return reports


def add_order(err_coarse, err_fine):
    if err_coarse is None or err_fine is None or err_coarse <= 0 or err_fine <= 0:
        return None
    return convergence_order(err_coarse, err_fine)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_csv(reports: Sequence[SolveReport], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rep in reports:
            row = rep.row()
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return path


def emit_diagnostics(run: RunResult, path, sv_floor: float = 1e-15) -> list[Path]:
    """Write the singular values of each captured S2 block, the selected
    eigenvalues d_n and the greedy indicator/true-error traces next to
    ``path``.  Returns the files written (none when diagnostics are off)."""
    if not run.diagnostics:
        return []
    path = Path(path)
    stem = path.with_suffix("")
    written = []

    svd_path = stem.parent / f"{stem.name}_svd.csv"
    with svd_path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("iteration", "index", "singular_value"))
        for it, S2 in enumerate(run.diagnostics["S2"], start=1):
            sv = np.linalg.svd(S2, compute_uv=False)
            for i, s in enumerate(sv[sv > sv_floor], start=1):
                w.writerow((it, i, repr(float(s))))
    written.append(svd_path)

    greedy = run.diagnostics["greedy"]
    if greedy:
        spec = run.diagnostics["spec"]
        dn_path = stem.parent / f"{stem.name}_dn.csv"
        with dn_path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("iteration", "n", "theta", "re_d", "im_d", "selected"))
            for it, st in enumerate(greedy, start=1):
                sel = set(st.theta_in)
                for n in range(spec.K):
                    w.writerow((it, n + 1, repr(float(spec.theta[n])), repr(float(spec.d[n].real)),
                                repr(float(spec.d[n].imag)), int(n in sel)))
        written.append(dn_path)

        ind_path = stem.parent / f"{stem.name}_indicator.csv"
        with ind_path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("iteration", "step", "r", "indicator", "true_error"))
            for it, st in enumerate(greedy, start=1):
                for step, tr in enumerate(st.trace, start=1):
                    w.writerow((it, step, tr["r"], repr(tr["indicator"]), repr(tr["true_error"])))
        written.append(ind_path)
    return written
