"""Full-order solvers for the shifted systems A_n = (d_n/tau) I - L_h.

``DirectStepB`` and ``MG1StepB`` implement the Step-(b) interface
``solve_all(S1, spec, L) -> (S2, stats)``; the reduced-basis backend lives in
:mod:`paradiag_rom.rom_solver`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels as kern
from .core_linalg import as_csr

log = logging.getLogger(__name__)

SMOOTHERS = ("gs", "ilu")
COARSEST_MAX = 8


class ShiftedSystem:
    """(sigma I - L) with sigma = d_n / tau; the complex CSR is built on demand."""

    def __init__(self, sigma: complex, L: sp.csr_matrix):
        self.sigma = complex(sigma)
        self.L = L
        if self.sigma.real <= 0:
            raise ValueError("shift must have a positive real part")
        self._A = None

    @property
    def A(self) -> sp.csr_matrix:
        if self._A is None:
            n = self.L.shape[0]
            self._A = as_csr(self.sigma * sp.identity(n, dtype=complex, format="csr") - self.L)
        return self._A

    def residual_norm(self, x, b) -> float:
        return float(np.linalg.norm(b - self.A @ x))


def _tridiagonal_parts(L: sp.csr_matrix):
    n = L.shape[0]
    diag = L.diagonal()
    lower = L.diagonal(-1) if n > 1 else np.zeros(0)
    upper = L.diagonal(1) if n > 1 else np.zeros(0)
    return lower.astype(float), diag.astype(float), upper.astype(float)


def is_tridiagonal(L: sp.spmatrix) -> bool:
    coo = L.tocoo()
    return bool(np.all(np.abs(coo.row - coo.col) <= 1))


def solve_direct(sys: ShiftedSystem, b: np.ndarray) -> np.ndarray:
    """Thomas algorithm when L is tridiagonal (1D), sparse LU otherwise."""
    b = np.asarray(b, dtype=complex)
    if is_tridiagonal(sys.L):
        lo, di, up = _tridiagonal_parts(sys.L)
        return kern.thomas_shifted(lo, di, up, np.array([sys.sigma]), b[:, None])[:, 0]
    return spla.splu(sys.A.tocsc()).solve(b)


# -- geometric multigrid ---------------------------------------------------


def _restriction_1d(N: int) -> sp.csr_matrix:
    """Full weighting onto the coarse points at fine indices 1, 3, 5, ..."""
    Nc = N // 2
    rows, cols, vals = [], [], []
    for I in range(Nc):
        c = 2 * I + 1
        for j, w in ((c - 1, 0.25), (c, 0.5), (c + 1, 0.25)):
            if 0 <= j < N:
                rows.append(I)
                cols.append(j)
                vals.append(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(Nc, N))


@dataclass
class _Level:
    N: int
    L: sp.csr_matrix
    diagptr: np.ndarray
    R: sp.csr_matrix | None = None  # to the next coarser level
    P: sp.csr_matrix | None = None


@dataclass
class MultigridTemplate:
    """Shift-independent part of the hierarchy: Galerkin coarse L's and transfers."""

    dim: int
    smoother: str
    levels: list[_Level] = field(default_factory=list)

    @property
    def sizes(self) -> list[int]:
        return [lev.N for lev in self.levels]


def build_hierarchy(L: sp.csr_matrix, dim: int, N: int, smoother: str = "ilu") -> MultigridTemplate:
    if smoother not in SMOOTHERS:
        raise ValueError(f"smoother must be one of {SMOOTHERS}")
    if L.shape[0] != N**dim:
        raise ValueError("operator size does not match the grid")
    tmpl = MultigridTemplate(dim, smoother)
    Lc = as_csr(L)
    while True:
        lev = _Level(N, Lc, kern.diag_positions(Lc.indptr, Lc.indices))
        tmpl.levels.append(lev)
        if N <= COARSEST_MAX or N // 2 < 1:
            break
        R1 = _restriction_1d(N)
        R = R1 if dim == 1 else sp.kron(R1, R1, format="csr")
        P = (2**dim) * R.T.tocsr()
        lev.R, lev.P = as_csr(R), as_csr(P)
        Lc = as_csr(lev.R @ Lc @ lev.P)
        N = N // 2
    return tmpl


class MultigridHierarchy:
    """A template specialised to one shift: per-level (sigma I - L_l) and
    smoother data, plus a dense LU of the coarsest operator."""

    def __init__(self, template: MultigridTemplate, sigma: complex):
        self.template = template
        self.sigma = complex(sigma)
        self.A = []
        self.smooth = []
        for lev in template.levels:
            data = (-lev.L.data).astype(np.complex128)
            data[lev.diagptr] += self.sigma
            self.A.append(data)
            if template.smoother == "ilu":
                self.smooth.append(kern.ilu0(lev.L.indptr, lev.L.indices, data, lev.diagptr))
            else:
                self.smooth.append(None)
        last = template.levels[-1]
        dense = sp.csr_matrix((self.A[-1], last.L.indices, last.L.indptr), shape=last.L.shape).toarray()
        self.coarse_lu = scipy.linalg.lu_factor(dense, check_finite=False)

    @property
    def n(self) -> int:
        return self.template.levels[0].L.shape[0]

    def matvec(self, x, level: int = 0):
        lev = self.template.levels[level]
        return kern.csr_matvec(lev.L.indptr, lev.L.indices, self.A[level], x)

    def residual(self, x, b, level: int = 0):
        lev = self.template.levels[level]
        return kern.residual(lev.L.indptr, lev.L.indices, self.A[level], x, b)

    def _smooth(self, level: int, b, x, forward: bool):
        lev = self.template.levels[level]
        if self.template.smoother == "gs":
            fn = kern.gs_forward if forward else kern.gs_backward
            fn(lev.L.indptr, lev.L.indices, self.A[level], lev.diagptr, b, x)
        else:
            r = self.residual(x, b, level)
            x += kern.ilu0_solve(lev.L.indptr, lev.L.indices, self.smooth[level], lev.diagptr, r)

    def cycle(self, b, x, level: int = 0):
        """One V(1,1)-cycle on ``level``; updates and returns ``x``."""
        levels = self.template.levels
        if level == len(levels) - 1:
            x[:] = scipy.linalg.lu_solve(self.coarse_lu, b, check_finite=False)
            return x
        lev = levels[level]
        self._smooth(level, b, x, forward=True)
        rc = lev.R @ self.residual(x, b, level)
        ec = self.cycle(rc, np.zeros(rc.shape[0], dtype=np.complex128), level + 1)
        x += lev.P @ ec
        self._smooth(level, b, x, forward=False)
        return x


def vcycle(h: MultigridHierarchy, b, x0=None) -> np.ndarray:
    b = np.asarray(b, dtype=np.complex128)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.complex128)
    return h.cycle(b, x)


@dataclass
class MGResult:
    x: np.ndarray
    cycles: int
    relres: float
    converged: bool


def solve_mg(h: MultigridHierarchy, b, tol: float = 1e-6, max_cycles: int = 100) -> MGResult:
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=np.complex128)
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    if bnorm == 0:
        return MGResult(x, 0, 0.0, True)
    relres = 1.0
    cycles = 0
    while cycles < max_cycles:
        h.cycle(b, x)
        cycles += 1
        relres = np.linalg.norm(h.residual(x, b)) / bnorm
        if relres <= tol:
            return MGResult(x, cycles, float(relres), True)
    log.warning("multigrid stopped at %d cycles with relative residual %.2e", cycles, relres)
    return MGResult(x, cycles, float(relres), False)


# -- Step-(b) backends -----------------------------------------------------


def _pair_columns(K: int) -> np.ndarray:
    """Indices 0..floor(K/2); the rest follow by conjugation (column K-n)."""
    return np.arange(K // 2 + 1)


def _reflect(S2: np.ndarray, K: int) -> None:
    for n in range(1, (K + 1) // 2):
        S2[:, K - n] = np.conj(S2[:, n])


class DirectStepB:
    """Exact Step (b): batched Thomas in 1D, one sparse LU per shift otherwise."""

    name = "direct"

    def __init__(self, conjugate_pairs: bool = False):
        self.conjugate_pairs = conjugate_pairs

    def solve_all(self, S1, spec, L):
        K = spec.K
        cols = _pair_columns(K) if self.conjugate_pairs else np.arange(K)
        S2 = np.empty(S1.shape, dtype=np.complex128)
        if is_tridiagonal(L):
            lo, di, up = _tridiagonal_parts(L)
            S2[:, cols] = kern.thomas_shifted(lo, di, up, spec.shifts[cols],
                                              np.ascontiguousarray(S1[:, cols], dtype=np.complex128))
        else:
            for n in cols:
                S2[:, n] = solve_direct(ShiftedSystem(spec.shifts[n], L), S1[:, n])
        if self.conjugate_pairs:
            _reflect(S2, K)
        return S2, {"solves": len(cols)}


class MG1StepB:
    """One V-cycle from a zero initial guess per column (ParaDIAG-MG)."""

    name = "mg1"

    def __init__(self, dim: int, N: int, smoother: str = "ilu", conjugate_pairs: bool = False):
        self.dim, self.N, self.smoother = dim, N, smoother
        self.conjugate_pairs = conjugate_pairs
        self._template = None
        self._L = None

    def template(self, L) -> MultigridTemplate:
        if self._L is not L:
            self._template = build_hierarchy(L, self.dim, self.N, self.smoother)
            self._L = L
        return self._template

    def solve_all(self, S1, spec, L):
        tmpl = self.template(L)
        K = spec.K
        cols = _pair_columns(K) if self.conjugate_pairs else np.arange(K)
        S2 = np.empty(S1.shape, dtype=np.complex128)
        for n in cols:
            h = MultigridHierarchy(tmpl, spec.shifts[n])
            S2[:, n] = vcycle(h, S1[:, n])
        if self.conjugate_pairs:
            _reflect(S2, K)
        return S2, {"solves": len(cols), "vcycles": len(cols)}
