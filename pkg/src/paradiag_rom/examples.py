"""Benchmark problems 1a, 1b, 2a, 2b, 2c, 2d.

Mesh sizes are given by the number of intervals per direction ``n`` (so
``h = length / n`` and there are ``n - 1`` interior points), which is how
the benchmark ladders are labelled: ``(64^2, 640)`` means ``h = tau = 1/64``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .discretization import PDEProblem, SpaceGrid, TimeGrid

EXAMPLE_IDS = ("1a", "1b", "2a", "2b", "2c", "2d")


@dataclass(frozen=True)
class ExampleSpec:
    id: str
    problem: PDEProblem
    description: str
    ladder: tuple[tuple[int, int], ...]
    smoother: str
    exact: Optional[Callable[..., np.ndarray]] = None
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.problem.dim

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def grids(self, n: int, K: int) -> tuple[SpaceGrid, TimeGrid]:
        return SpaceGrid(self.dim, n - 1, self.problem.length), TimeGrid(K, self.problem.T)


def _zero(*args):
    return 0.0


def _n_terms(coef_decay: Callable[[np.ndarray], np.ndarray], t_min: float, floor: int = 50,
             rtol: float = 1e-14, cap: int = 200_000) -> int:
    """Smallest term count after which every further term (at times >= t_min)
    is below ``rtol`` relative to the leading one."""
    m = floor
    lead = coef_decay(np.array([0]), t_min)[0]
    while m < cap:
        ks = np.arange(m, 2 * m)
        if np.all(np.abs(coef_decay(ks, t_min)) < rtol * abs(lead)):
            return m
        m *= 2
    return cap


# -- 1a: heat equation on (0, pi), triangle initial data ------------------

EPS_1A = 0.1


def _triangle(x):
    return np.where(x <= np.pi / 2, 2 * x, 2 * (np.pi - x))


def _exact_1a(x, t):
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return _triangle(x)

    def term(m, tt):
        k = 2 * m + 1
        return np.exp(-EPS_1A * k**2 * tt) / k**2

    M = _n_terms(term, t)
    k = 2 * np.arange(M) + 1
    weights = 8 / np.pi * np.exp(-EPS_1A * k**2 * t) / k**2
    return np.cos(np.multiply.outer(x, k) * 1.0 - k * np.pi / 2) @ weights


# -- 1b: convection-diffusion with step boundary data ----------------------

EPS_1B, C_1B = 0.1, 0.2

# -- 2a: heat equation on the unit square ----------------------------------

EPS_2A = 0.01


def _series_2a_1d(x, t):
    """Solution of v_t = eps v_xx on (0,1), v(x,0) = x(x-1), zero BCs."""
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return x * (x - 1)

    def term(m, tt):
        k = 2 * m + 1
        return np.exp(-EPS_2A * (k * np.pi) ** 2 * tt) / k**3

    M = _n_terms(term, t)
    k = 2 * np.arange(M) + 1
    weights = -8 / (np.pi**3 * k**3) * np.exp(-EPS_2A * (k * np.pi) ** 2 * t)
    return np.sin(np.pi * np.multiply.outer(x, k)) @ weights


def _exact_2a(x, y, t):
    return _series_2a_1d(x, t) * _series_2a_1d(y, t)


# -- 2b: variable diffusion, manufactured solution -------------------------


def _a_2b(x, y):
    return 1e-5 * np.sin(np.pi * x * y)


def _exact_2b(x, y, t):
    return np.exp(-t / 10) * np.exp(np.cos(2 * np.pi * x) + np.sin(3 * np.pi * y))


def _source_2b(x, y, t):
    u = _exact_2b(x, y, t)
    u_t = -u / 10
    u_x = -2 * np.pi * np.sin(2 * np.pi * x) * u
    u_y = 3 * np.pi * np.cos(3 * np.pi * y) * u
    u_xx = 4 * np.pi**2 * (np.sin(2 * np.pi * x) ** 2 - np.cos(2 * np.pi * x)) * u
    u_yy = 9 * np.pi**2 * (np.cos(3 * np.pi * y) ** 2 - np.sin(3 * np.pi * y)) * u
    a = _a_2b(x, y)
    a_x = 1e-5 * np.pi * y * np.cos(np.pi * x * y)
    a_y = 1e-5 * np.pi * x * np.cos(np.pi * x * y)
    return u_t - (a_x * u_x + a_y * u_y + a * (u_xx + u_yy))


# -- 2c: convection-dominated hump with an internal layer ------------------

EPS_2C = 1e-4
C_2C = (2.0, 3.0)


def _hump_parts(x, y):
    s = 2 / np.sqrt(EPS_2C)
    g = 0.25**2 - (x - 0.5) ** 2 - (y - 0.5) ** 2
    g_x, g_y = -2 * (x - 0.5), -2 * (y - 0.5)
    D = 1 + (s * g) ** 2
    Q = 0.5 + np.arctan(s * g) / np.pi
    Q_x = s * g_x / (np.pi * D)
    Q_y = s * g_y / (np.pi * D)
    lap_Q = s / np.pi * (-4 / D - 2 * s**2 * g * (g_x**2 + g_y**2) / D**2)
    P = 16 * x * (1 - x) * y * (1 - y)
    P_x = 16 * (1 - 2 * x) * y * (1 - y)
    P_y = 16 * x * (1 - x) * (1 - 2 * y)
    lap_P = -32 * (y * (1 - y) + x * (1 - x))
    return P, P_x, P_y, lap_P, Q, Q_x, Q_y, lap_Q


def _exact_2c(x, y, t):
    P, *_, Q, _, _, _ = _hump_parts(x, y)
    return np.exp(-t) * P * Q


def _source_2c(x, y, t):
    P, P_x, P_y, lap_P, Q, Q_x, Q_y, lap_Q = _hump_parts(x, y)
    e = np.exp(-t)
    u = e * P * Q
    u_x = e * (P_x * Q + P * Q_x)
    u_y = e * (P_y * Q + P * Q_y)
    lap_u = e * (lap_P * Q + 2 * (P_x * Q_x + P_y * Q_y) + P * lap_Q)
    return -u - EPS_2C * lap_u + C_2C[0] * u_x + C_2C[1] * u_y


# -- 2d: recirculating wind with a hot wall --------------------------------

EPS_2D = 1 / 200


def _hot_wall(x, y, t):
    return np.where(np.asarray(x) == 1.0, 1 - np.exp(-10 * t), 0.0)


MANUFACTURED_SOURCES = {"2b": _source_2b, "2c": _source_2c}

_LADDER_1D = ((256, 2560), (512, 5120), (1024, 10240))
_LADDER_2D = ((64, 640), (128, 1280), (256, 2560))


def _const(v):
    return lambda *xs: np.full(np.shape(xs[0]), v, dtype=float)


def get_example(example_id: str) -> ExampleSpec:
    if example_id == "1a":
        prob = PDEProblem(dim=1, a=_const(EPS_1A), p=_const(0.0), f=_zero, g=_zero,
                          u0=_triangle, T=10.0, length=np.pi)
        return ExampleSpec("1a", prob, "1D heat equation, triangle initial data", _LADDER_1D,
                           "gs", _exact_1a, {"eps": EPS_1A})
    if example_id == "1b":
        prob = PDEProblem(dim=1, a=_const(EPS_1B), p=_const(C_1B), f=_zero,
                          g=lambda x, t: np.where(np.asarray(x) == 0.0, 1.0, 0.0),
                          u0=_const(0.0), T=10.0)
        return ExampleSpec("1b", prob, "1D convection-diffusion, step boundary data", _LADDER_1D,
                           "gs", None, {"eps": EPS_1B, "c": C_1B, "peclet": C_1B / EPS_1B})
    if example_id == "2a":
        prob = PDEProblem(dim=2, a=_const(EPS_2A), p=_const(0.0), q=_const(0.0), f=_zero,
                          g=_zero, u0=lambda x, y: x * (x - 1) * y * (y - 1), T=10.0)
        return ExampleSpec("2a", prob, "2D heat equation", _LADDER_2D, "ilu", _exact_2a,
                           {"eps": EPS_2A})
    if example_id == "2b":
        prob = PDEProblem(dim=2, a=_a_2b, p=_const(0.0), q=_const(0.0), f=_source_2b,
                          g=_exact_2b, u0=lambda x, y: _exact_2b(x, y, 0.0), T=10.0)
        return ExampleSpec("2b", prob, "2D heat equation, variable diffusion", _LADDER_2D,
                           "ilu", _exact_2b, {})
    if example_id == "2c":
        prob = PDEProblem(dim=2, a=_const(EPS_2C), p=_const(C_2C[0]), q=_const(C_2C[1]),
                          f=_source_2c, g=_zero, u0=lambda x, y: _exact_2c(x, y, 0.0), T=10.0)
        return ExampleSpec("2c", prob, "2D convection-diffusion, internal layer", _LADDER_2D,
                           "ilu", _exact_2c,
                           {"eps": EPS_2C, "c": C_2C, "peclet": float(np.hypot(*C_2C)) / EPS_2C})
    if example_id == "2d":
        prob = PDEProblem(dim=2, a=_const(EPS_2D), p=lambda x, y: 2 * y * (1 - x**2),
                          q=lambda x, y: -2 * x * (1 - y**2), f=_zero, g=_hot_wall,
                          u0=_const(0.0), T=10.0)
        return ExampleSpec("2d", prob, "2D convection-diffusion, recirculating wind", _LADDER_2D,
                           "ilu", None, {"eps": EPS_2D})
    raise ValueError(f"unknown example {example_id!r}; expected one of {EXAMPLE_IDS}")


def manufactured_source(example_id: str):
    try:
        return MANUFACTURED_SOURCES[example_id]
    except KeyError:
        raise ValueError(f"no manufactured source for example {example_id!r}") from None


def exact_solution_block(example_id: str, grid: SpaceGrid, timegrid: TimeGrid):
    """Exact solution at interior nodes and times t_1..t_K, or ``None`` when
    no closed form is available (1b, 2d)."""
    ex = get_example(example_id)
    if ex.exact is None:
        return None
    coords = grid.coords()
    out = np.empty((grid.size, timegrid.K))
    if example_id == "2a":
        # separable: evaluate the 1D series once per time on the 1D nodes
        x1 = grid.nodes_1d
        for k, t in enumerate(timegrid.times):
            v = _series_2a_1d(x1, t)
            out[:, k] = np.outer(v, v).ravel()
        return out
    for k, t in enumerate(timegrid.times):
        out[:, k] = ex.exact(*coords, t)
    return out
