"""Reduced-basis Step (b): greedy basis generation for the K shifted systems

    ((d_n/tau) I - L_h) x_n = b_n,   n = 1..K.

Because every A_n differs from -L_h only by a multiple of the identity, one
cached pair ``W = L_h Phi`` and ``Lhat = Phi^* L_h Phi`` serves all n: the
reduced matrix is ``(d_n/tau) I_r - Lhat`` and the residual is
``b_n - (d_n/tau) Phi xhat + W xhat``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .core_linalg import dense_lu_solve, orthonormalize_against
from .stepb_fom import MultigridHierarchy, ShiftedSystem, build_hierarchy, solve_direct, solve_mg

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RomConfig:
    tol_rom: float = 1e-3
    r_p: float = 0.1
    coarse_factor: int = 4
    r_max: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.tol_rom <= 0:
            raise ValueError("tol_rom must be positive")
        if not 0 < self.r_p <= 1:
            raise ValueError("r_p must lie in (0, 1]")
        if self.coarse_factor not in (1, 2, 4, 8):
            raise ValueError("coarse_factor must be 1, 2, 4 or 8")
        if self.r_max < 1:
            raise ValueError("r_max must be at least 1")


class ReducedBasis:
    """Orthonormal basis with the products needed by every reduced solve."""

    def __init__(self, L: sp.csr_matrix, S1: Optional[np.ndarray] = None):
        self.L = L
        n = L.shape[0]
        self.Phi = np.zeros((n, 0), dtype=complex)
        self.W = np.zeros((n, 0), dtype=complex)
        self.Lhat = np.zeros((0, 0), dtype=complex)
        self.theta_in: list[int] = []
        self.S1 = S1
        # Phi^* S1, one row per basis vector
        self.F = None if S1 is None else np.zeros((0, S1.shape[1]), dtype=complex)

    @property
    def r(self) -> int:
        return self.Phi.shape[1]

    def extend(self, x: np.ndarray, n_new: int) -> bool:
        """Orthonormalize ``x`` against the basis and append it.

        Returns False (leaving the basis unchanged) when ``x`` is already in
        the span.
        """
        w = orthonormalize_against(x, self.Phi)
        if w is None:
            return False
        Lw = self.L @ w
        top = self.Phi.conj().T @ Lw
        bottom = w.conj() @ self.W
        corner = w.conj() @ Lw
        r = self.r
        Lhat = np.empty((r + 1, r + 1), dtype=complex)
        Lhat[:r, :r] = self.Lhat
        Lhat[:r, r] = top
        Lhat[r, :r] = bottom
        Lhat[r, r] = corner
        self.Lhat = Lhat
        self.Phi = np.column_stack([self.Phi, w])
        self.W = np.column_stack([self.W, Lw])
        if self.S1 is not None:
            self.F = np.vstack([self.F, w.conj() @ self.S1])
        self.theta_in.append(int(n_new))
        return True


def solve_reduced(basis: ReducedBasis, sigma: complex, b_reduced: np.ndarray) -> np.ndarray:
    """Galerkin system ``(sigma I_r - Lhat) xhat = Phi^* b``."""
    Ar = sigma * np.eye(basis.r) - basis.Lhat
    return dense_lu_solve(Ar, b_reduced)


def solve_reduced_batch(basis: ReducedBasis, sigmas: np.ndarray, B_reduced: np.ndarray) -> np.ndarray:
    """Vectorized :func:`solve_reduced` over several shifts; ``B_reduced`` is r x m."""
    r = basis.r
    Ar = sigmas[:, None, None] * np.eye(r) - basis.Lhat[None, :, :]
    return np.linalg.solve(Ar, B_reduced.T[:, :, None])[:, :, 0].T


def coarse_index_set(dim: int, N: int, coarse_factor: int) -> np.ndarray:
    """Every ``coarse_factor``-th interior point per direction (starting at
    index ``coarse_factor - 1``), tensorized in 2D."""
    if coarse_factor < 1:
        raise ValueError("coarse_factor must be >= 1")
    sel = np.arange(coarse_factor - 1, N, coarse_factor)
    if sel.size == 0:
        sel = np.arange(N)
    if dim == 1:
        return sel
    return (sel[None, :] + N * sel[:, None]).ravel()


def error_indicator(basis: ReducedBasis, sigmas, Xhat, B, coarse_idx) -> np.ndarray:
    """Relative residuals ||r_n|| / ||b_n|| restricted to ``coarse_idx``.

    ``Xhat`` (r x m) holds the reduced solutions for the m right-hand sides
    in the columns of ``B`` (full-length, n x m).  Columns with a vanishing
    restricted RHS fall back to the absolute residual.
    """
    sigmas = np.atleast_1d(sigmas)
    Bc = B[coarse_idx]
    R = Bc - sigmas * (basis.Phi[coarse_idx] @ Xhat) + basis.W[coarse_idx] @ Xhat
    num = np.linalg.norm(R, axis=0)
    den = np.linalg.norm(Bc, axis=0)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), num)


def sample_candidates(remaining: np.ndarray, r_p: float, K: int, rng: np.random.Generator) -> np.ndarray:
    """Random subset of size min(round(r_p K), |remaining|) without replacement, sorted."""
    P = max(1, int(np.floor(r_p * K + 0.5)))
    if P >= remaining.size:
        return np.sort(remaining)
    return np.sort(rng.choice(remaining, size=P, replace=False))


@dataclass
class GreedyStats:
    r: int
    theta_in: list[int]
    worst_indicator: list[float] = field(default_factory=list)
    fom_cycles: list[int] = field(default_factory=list)
    converged: bool = True
    trace: list[dict] = field(default_factory=list)


FomSolver = Callable[[complex, np.ndarray], tuple[np.ndarray, int]]


def greedy_solve_all(S1, spec, L, config: RomConfig, fom_solver: FomSolver, coarse_idx,
                     rng: Optional[np.random.Generator] = None, exact: Optional[np.ndarray] = None):
    """Greedy reduced-basis approximation of all K Step-(b) solves.

    ``fom_solver(sigma, b) -> (x, cycles)`` solves one full-order system.
    With ``exact`` (the true S2), the per-step true errors of the sampled
    candidates are recorded in ``stats.trace``.
    Returns ``(S2, basis, stats)``.
    """
    K = spec.K
    sigmas = spec.shifts
    if rng is None:
        rng = np.random.default_rng(config.seed)
    S1 = np.asarray(S1, dtype=complex)
    S2 = np.empty_like(S1)
    basis = ReducedBasis(L, S1)
    stats = GreedyStats(0, basis.theta_in)
    r_cap = min(K, config.r_max)

    exact_cols: set[int] = set()

    def add(n):
        x, cycles = fom_solver(sigmas[n], S1[:, n])
        stats.fom_cycles.append(cycles)
        S2[:, n] = x
        exact_cols.add(n)
        basis.extend(x, n)

    # argmax picks the smallest index among ties
    add(int(np.argmax(np.linalg.norm(S1, axis=0))))

    while True:
        remaining = np.array([n for n in range(K) if n not in exact_cols], dtype=int)
        if remaining.size == 0:
            break
        cand = sample_candidates(remaining, config.r_p, K, rng)
        Xhat = solve_reduced_batch(basis, sigmas[cand], basis.F[:, cand])
        E = error_indicator(basis, sigmas[cand], Xhat, S1[:, cand], coarse_idx)
        worst = int(np.argmax(E))
        stats.worst_indicator.append(float(E[worst]))
        if exact is not None:
            err = np.linalg.norm(exact[:, cand] - basis.Phi @ Xhat, axis=0)
            err /= np.linalg.norm(exact[:, cand], axis=0)
            stats.trace.append({"r": basis.r, "indicator": float(E[worst]),
                                "true_error": float(err.max())})
        if E[worst] < config.tol_rom:
            break
        if basis.r >= r_cap:
            stats.converged = False
            log.info("reduced basis hit r_max=%d with indicator %.2e", r_cap, E[worst])
            break
        add(int(cand[worst]))

    remaining = np.array([n for n in range(K) if n not in exact_cols], dtype=int)
    if remaining.size:
        Xhat = solve_reduced_batch(basis, sigmas[remaining], basis.F[:, remaining])
        S2[:, remaining] = basis.Phi @ Xhat
    stats.r = basis.r
    return S2, basis, stats


class ROMStepB:
    """Step-(b) backend using :func:`greedy_solve_all` with a fresh basis per call.

    Full-order solves use the Thomas algorithm for tridiagonal (1D) operators
    and multigrid V-cycles to ``fom_tol`` otherwise.
    """

    name = "rom"

    def __init__(self, dim: int, N: int, config: RomConfig = RomConfig(), smoother: str = "ilu",
                 fom_tol: float = 1e-6, fom: Optional[str] = None):
        self.dim, self.N = dim, N
        self.config = config
        self.smoother = smoother
        self.fom_tol = fom_tol
        self.fom = fom or ("direct" if dim == 1 else "mg")
        self.rng = np.random.default_rng(config.seed)
        self.coarse_idx = coarse_index_set(dim, N, config.coarse_factor)
        self._template = None
        self._L = None
        self.history: list[GreedyStats] = []
        self.capture_exact = False

    def _fom_solver(self, L) -> FomSolver:
        if self.fom == "direct":
            return lambda sigma, b: (solve_direct(ShiftedSystem(sigma, L), b), 0)
        if self._L is not L:
            self._template = build_hierarchy(L, self.dim, self.N, self.smoother)
            self._L = L

        def solve(sigma, b):
            res = solve_mg(MultigridHierarchy(self._template, sigma), b, self.fom_tol)
            return res.x, res.cycles

        return solve

    def solve_all(self, S1, spec, L):
        exact = None
        if self.capture_exact:
            exact = np.column_stack([solve_direct(ShiftedSystem(s, L), S1[:, n])
                                     for n, s in enumerate(spec.shifts)])
        S2, basis, st = greedy_solve_all(S1, spec, L, self.config, self._fom_solver(L),
                                         self.coarse_idx, self.rng, exact)
        self.history.append(st)
        return S2, {
            "r": st.r,
            "theta_in": list(st.theta_in),
            "fom_cycles": list(st.fom_cycles),
            "rom_converged": st.converged,
        }
