"""Upwind finite differences for the unsteady convection-diffusion equation

    u_t = div(a grad u) - c . grad u + f

on an interval or a square with Dirichlet data, backward Euler in time.
Interior unknowns are ordered lexicographically with x running fastest.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .core_linalg import as_csr

Func = Callable[..., np.ndarray]


@dataclass(frozen=True)
class PDEProblem:
    """Continuous problem data.

    Coefficient callables take coordinate arrays (``x`` in 1D, ``x, y`` in
    2D) and return arrays of the same shape; ``f`` and ``g`` additionally
    take the time as a trailing scalar argument.  ``q`` is ignored in 1D.
    """

    dim: int
    a: Func
    p: Func
    f: Func
    g: Func
    u0: Func
    T: float
    q: Optional[Func] = None
    length: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if not self.T > 0:
            raise ValueError("final time T must be positive")
        if self.dim == 2 and self.q is None:
            raise ValueError("2D problems need both velocity components")


@dataclass(frozen=True)
class SpaceGrid:
    dim: int
    N: int
    length: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one interior point per direction")

    @property
    def h(self) -> float:
        return self.length / (self.N + 1)

    @property
    def size(self) -> int:
        return self.N**self.dim

    @property
    def nodes_1d(self) -> np.ndarray:
        return self.h * np.arange(1, self.N + 1)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Interior node coordinates in unknown order."""
        x = self.nodes_1d
        if self.dim == 1:
            return (x,)
        return np.tile(x, self.N), np.repeat(x, self.N)


@dataclass(frozen=True)
class TimeGrid:
    K: int
    T: float

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("need at least one time step")

    @property
    def tau(self) -> float:
        return self.T / self.K

    @property
    def times(self) -> np.ndarray:
        """Nodes t_1 .. t_K (t_0 = 0 is the initial time)."""
        return self.tau * np.arange(1, self.K + 1)


def _stencil(problem: PDEProblem, grid: SpaceGrid):
    """Diagonal of L_h plus one ``(inside, offset, weight, boundary_coords)``
    tuple per neighbour direction.

    ``weight`` is the (nonnegative) L_h entry coupling a point to that
    neighbour, ``inside`` flags points whose neighbour is an unknown, and
    ``boundary_coords`` locates the Dirichlet node for the rest.
    """
    h, N, Lx = grid.h, grid.N, grid.length
    idx = np.arange(N)
    if grid.dim == 1:
        (x,) = grid.coords()
        i = idx
        a_w = problem.a(x - h / 2)
        a_e = problem.a(x + h / 2)
        faces = [a_w, a_e]
        p = np.broadcast_to(problem.p(x), x.shape).astype(float)
        pp, pm = np.maximum(p, 0.0), np.minimum(p, 0.0)
        w_w = a_w / h**2 + pp / h
        w_e = a_e / h**2 - pm / h
        diag = -(a_w + a_e) / h**2 - (pp - pm) / h
        dirs = [
            (i > 0, -1, w_w, (np.zeros_like(x),)),
            (i < N - 1, +1, w_e, (np.full_like(x, Lx),)),
        ]
    else:
        x, y = grid.coords()
        i = np.tile(idx, N)
        j = np.repeat(idx, N)
        a_w = problem.a(x - h / 2, y)
        a_e = problem.a(x + h / 2, y)
        a_s = problem.a(x, y - h / 2)
        a_n = problem.a(x, y + h / 2)
        faces = [a_w, a_e, a_s, a_n]
        p = np.broadcast_to(problem.p(x, y), x.shape).astype(float)
        q = np.broadcast_to(problem.q(x, y), x.shape).astype(float)
        pp, pm = np.maximum(p, 0.0), np.minimum(p, 0.0)
        qp, qm = np.maximum(q, 0.0), np.minimum(q, 0.0)
        diag = -(a_w + a_e + a_s + a_n) / h**2 - (pp - pm + qp - qm) / h
        dirs = [
            (i > 0, -1, a_w / h**2 + pp / h, (np.zeros_like(x), y)),
            (i < N - 1, +1, a_e / h**2 - pm / h, (np.full_like(x, Lx), y)),
            (j > 0, -N, a_s / h**2 + qp / h, (x, np.zeros_like(y))),
            (j < N - 1, +N, a_n / h**2 - qm / h, (x, np.full_like(y, Lx))),
        ]
    for face in faces:
        if np.any(np.broadcast_to(face, x.shape) <= 0):
            raise ValueError("diffusion coefficient must be positive at every cell face")
    return diag, dirs


def assemble_spatial_operator(problem: PDEProblem, grid: SpaceGrid) -> sp.csr_matrix:
    """Real sparse L_h; boundary couplings are dropped (they go to the RHS)."""
    if grid.dim != problem.dim:
        raise ValueError("grid dimension does not match the problem")
    diag, dirs = _stencil(problem, grid)
    n = grid.size
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    vals = [diag]
    for inside, offset, weight, _ in dirs:
        r = np.flatnonzero(inside)
        rows.append(r)
        cols.append(r + offset)
        vals.append(np.broadcast_to(weight, (n,))[r])
    L = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return as_csr(L)


def assemble_rhs_block(problem: PDEProblem, grid: SpaceGrid, timegrid: TimeGrid) -> np.ndarray:
    """Columns F^k + G^k for k = 1..K, with u0/tau added to the first one."""
    coords = grid.coords()
    _, dirs = _stencil(problem, grid)
    out = np.empty((grid.size, timegrid.K))
    for k, t in enumerate(timegrid.times):
        out[:, k] = np.broadcast_to(problem.f(*coords, t), (grid.size,))
    for inside, _, weight, bcoords in dirs:
        r = np.flatnonzero(~inside)
        if r.size == 0:
            continue
        pts = tuple(c[r] for c in bcoords)
        w = np.broadcast_to(weight, (grid.size,))[r]
        for k, t in enumerate(timegrid.times):
            out[r, k] += w * problem.g(*pts, t)
    out[:, 0] += np.broadcast_to(problem.u0(*coords), (grid.size,)) / timegrid.tau
    return out
