"""The all-at-once space-time system and its sequential time-stepping oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core_linalg import from_block, to_block


@dataclass(frozen=True)
class AllAtOnceSystem:
    """``(B/tau (x) I - I (x) L_h) U = F`` with B the lower bidiagonal
    backward-difference matrix; ``rhs`` is the ``(n_space, K)`` block of F."""

    L: sp.csr_matrix
    tau: float
    rhs: np.ndarray

    def __post_init__(self):
        if self.L.shape[0] != self.L.shape[1]:
            raise ValueError("L_h must be square")
        if self.rhs.ndim != 2 or self.rhs.shape[0] != self.L.shape[0]:
            raise ValueError("rhs must be an (n_space, K) block")

    @property
    def K(self) -> int:
        return self.rhs.shape[1]

    @property
    def n_space(self) -> int:
        return self.L.shape[0]

    @property
    def size(self) -> int:
        return self.n_space * self.K

    def rhs_vector(self) -> np.ndarray:
        return from_block(self.rhs)


def apply_global_operator(sys: AllAtOnceSystem, U: np.ndarray) -> np.ndarray:
    U = np.asarray(U)
    if U.shape != (sys.size,):
        raise ValueError(f"expected a vector of length {sys.size}, got shape {U.shape}")
    Ub = to_block(U, sys.K)
    out = Ub / sys.tau - sys.L @ Ub
    out[:, 1:] -= Ub[:, :-1] / sys.tau
    return from_block(out)


def sequential_solve(sys: AllAtOnceSystem) -> np.ndarray:
    """March backward Euler from the initial data folded into ``rhs``.

    Returns the ``(n_space, K)`` block of U^1..U^K.
    """
    n = sys.n_space
    M = (sp.identity(n, format="csc") / sys.tau - sys.L).tocsc()
    try:
        lu = spla.splu(M)
    except RuntimeError as exc:
        raise np.linalg.LinAlgError(f"time-step matrix is singular: {exc}") from exc
    U = np.empty((n, sys.K), dtype=np.result_type(sys.rhs, float))
    prev = np.zeros(n, dtype=U.dtype)
    for k in range(sys.K):
        prev = lu.solve(sys.rhs[:, k] + prev / sys.tau)
        U[:, k] = prev
    return U


def spacetime_error(U: np.ndarray, Uexact: np.ndarray, h: float, dim: int, tau: float) -> float:
    """Discrete L2 norm in space and time, weights h^dim * tau."""
    U = np.asarray(U)
    Uexact = np.asarray(Uexact)
    if U.shape != Uexact.shape:
        raise ValueError("shape mismatch")
    return float(np.sqrt(h**dim * tau) * np.linalg.norm((U - Uexact).ravel()))


def convergence_order(err_coarse: float, err_fine: float) -> float:
    if err_coarse <= 0 or err_fine <= 0:
        raise ValueError("errors must be positive")
    return float(np.log2(err_coarse / err_fine))
