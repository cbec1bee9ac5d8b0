"""Right-preconditioned flexible GMRES without restarts."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FgmresConfig:
    tol: float = 1e-6
    max_iter: int = 100

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class FgmresResult:
    x: np.ndarray
    iters: int
    relres: float
    history: list[float]
    converged: bool
    estimate: float = np.nan
    orthogonality_loss: float = 0.0
    precond_stats: list = field(default_factory=list)


def _givens(a: float, b: float) -> tuple[float, float]:
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, b / r


def fgmres_solve(
    apply_A: Callable[[np.ndarray], np.ndarray],
    apply_M: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    config: FgmresConfig = FgmresConfig(),
) -> FgmresResult:
    """Solve ``A x = b`` from x0 = 0.

    ``apply_M`` may change between calls; it may return either a vector or a
    ``(vector, stats)`` pair, and the stats are collected in
    ``precond_stats``.  Convergence is declared on the explicitly recomputed
    relative residual, not only on the Givens estimate.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return FgmresResult(np.zeros(n), 0, 0.0, [0.0], True, 0.0)

    m = config.max_iter
    V = [b / bnorm]
    Z = []
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    g = np.zeros(m + 1)
    g[0] = bnorm
    history = [1.0]
    stats = []

    x = np.zeros(n)
    relres = 1.0
    j = 0
    for j in range(m):
        out = apply_M(V[j])
        if isinstance(out, tuple):
            out, st = out
            stats.append(st)
        # copies guard against callbacks that return their input
        Z.append(np.array(out, dtype=float))
        w = np.array(apply_A(Z[j]), dtype=float)
        # modified Gram-Schmidt, applied twice
        for _ in range(2):
            for i in range(j + 1):
                hij = V[i] @ w
                H[i, j] += hij
                w -= hij * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        breakdown = H[j + 1, j] <= 1e-14 * bnorm
        if not breakdown:
            V.append(w / H[j + 1, j])

        for i in range(j):
            hi, hi1 = H[i, j], H[i + 1, j]
            H[i, j] = cs[i] * hi + sn[i] * hi1
            H[i + 1, j] = -sn[i] * hi + cs[i] * hi1
        cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
        H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        estimate = abs(g[j + 1]) / bnorm
        history.append(estimate)

        if estimate <= config.tol or breakdown or j == m - 1:
            y = np.linalg.solve(np.triu(H[: j + 1, : j + 1]), g[: j + 1])
            x = np.zeros(n)
            for zi, yi in zip(Z, y):
                x += yi * zi
            relres = np.linalg.norm(b - apply_A(x)) / bnorm
            if relres <= config.tol or breakdown:
                break
            log.debug("estimated residual %.2e but true residual %.2e; continuing", estimate, relres)

    iters = j + 1
    history[-1] = relres
    gram = np.array([[vi @ vk for vk in V] for vi in V])
    loss = float(np.max(np.abs(gram - np.eye(len(V)))))
    if loss > 1e-8:
        log.warning("Krylov basis lost orthogonality: %.2e", loss)
    converged = bool(relres <= config.tol)
    if not converged:
        log.warning("FGMRES did not converge in %d iterations (relres %.2e)", iters, relres)
    return FgmresResult(x, iters, float(relres), history, converged, float(estimate), loss, stats)
