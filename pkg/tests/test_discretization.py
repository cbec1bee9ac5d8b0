import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from paradiag_rom.discretization import (PDEProblem, SpaceGrid, TimeGrid, assemble_rhs_block,
                                         assemble_spatial_operator)
from paradiag_rom.examples import (EXAMPLE_IDS, exact_solution_block, get_example,
                                   manufactured_source)

from conftest import const, diffusion_problem, zero


def kron_oracle(a, p, q, N, h):
    """Dense L_h from Kronecker factors: face-weighted difference operators
    for diffusion, one-sided differences split by the sign of the velocity."""
    I = np.eye(N)
    D = (np.eye(N + 1, N) - np.eye(N + 1, N, k=-1))  # (N+1) x N, face j between nodes j-1, j
    Dm = np.eye(N) - np.eye(N, k=-1)                  # backward difference
    Dp = np.eye(N, k=1) - np.eye(N)                   # forward difference
    x = h * np.arange(1, N + 1)
    xf = h * (np.arange(N + 1) + 0.5)                 # face coordinates
    X, Y = np.tile(x, N), np.repeat(x, N)
    # x-faces: (N+1) per row j, ordered x-fastest
    ax = a(np.tile(xf, N), np.repeat(x, N + 1))
    ay = a(np.tile(x, N + 1), np.repeat(xf, N))
    Dx = np.kron(I, D)
    Dy = np.kron(D, I)
    diff = -(Dx.T @ np.diag(ax) @ Dx + Dy.T @ np.diag(ay) @ Dy) / h**2
    pv, qv = p(X, Y), q(X, Y)
    conv = (np.diag(np.maximum(pv, 0)) @ np.kron(I, Dm) + np.diag(np.minimum(pv, 0)) @ np.kron(I, Dp)
            + np.diag(np.maximum(qv, 0)) @ np.kron(Dm, I) + np.diag(np.minimum(qv, 0)) @ np.kron(Dp, I)) / h
    return diff - conv


def test_1d_pure_diffusion_stencil():
    eps, N = 0.3, 3
    grid = SpaceGrid(1, N)
    L = assemble_spatial_operator(diffusion_problem(eps=eps), grid).toarray()
    np.testing.assert_allclose(-L[1], eps / grid.h**2 * np.array([-1, 2, -1]), rtol=1e-14)


def test_1d_upwind_positive_velocity():
    eps, p, N = 0.3, 2.0, 5
    grid = SpaceGrid(1, N)
    L0 = assemble_spatial_operator(diffusion_problem(eps=eps), grid).toarray()
    L = assemble_spatial_operator(diffusion_problem(eps=eps, p=p), grid).toarray()
    np.testing.assert_allclose(-(L - L0)[2, 1:4], p / grid.h * np.array([-1, 1, 0]), atol=1e-12)


def test_2d_kronecker_oracle_variable_diffusion():
    N = 3
    grid = SpaceGrid(2, N)
    prob = diffusion_problem(dim=2, a=lambda x, y: 1 + x)
    L = assemble_spatial_operator(prob, grid).toarray()
    ref = kron_oracle(prob.a, prob.p, prob.q, N, grid.h)
    np.testing.assert_allclose(L, ref, rtol=0, atol=1e-13 * np.abs(ref).max())


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_2d_kronecker_oracle_random_coefficients(N, seed):
    c = np.random.default_rng(seed).uniform(-2, 2, 6)
    a = lambda x, y: 0.5 + 0.4 * np.sin(c[0] * x + c[1] * y) ** 2
    p = lambda x, y: c[2] * np.cos(3 * x) + c[3] * y
    q = lambda x, y: c[4] * x * y - c[5]
    prob = PDEProblem(2, a, p, zero, zero, zero, 1.0, q=q)
    grid = SpaceGrid(2, N)
    L = assemble_spatial_operator(prob, grid).toarray()
    ref = kron_oracle(a, p, q, N, grid.h)
    np.testing.assert_allclose(L, ref, rtol=0, atol=1e-12 * np.abs(ref).max())


def test_nonpositive_diffusion_rejected():
    with pytest.raises(ValueError):
        assemble_spatial_operator(diffusion_problem(eps=0.0), SpaceGrid(1, 4))


def test_grid_and_problem_validation():
    with pytest.raises(ValueError):
        SpaceGrid(1, 0)
    with pytest.raises(ValueError):
        diffusion_problem(T=0.0)
    g = SpaceGrid(2, 63)
    assert abs(g.h * 64 - 1) < 1e-14 and g.size == 63**2
    tg = TimeGrid(640, 10.0)
    assert abs(tg.tau * 640 - 10) < 1e-14
    assert tg.times[0] == pytest.approx(tg.tau) and tg.times[-1] == pytest.approx(10.0)


@pytest.mark.parametrize("eid", EXAMPLE_IDS)
def test_m_matrix_and_dominance(eid):
    ex = get_example(eid)
    grid, _ = ex.grids(17, 4)
    A = -assemble_spatial_operator(ex.problem, grid)
    diag = A.diagonal()
    off = A - sp.diags(diag)
    assert np.all(diag > 0)
    assert off.data.max(initial=0.0) <= 0
    absoff = abs(off)
    rows = np.asarray(absoff.sum(axis=1)).ravel()
    cols = np.asarray(absoff.sum(axis=0)).ravel()
    assert np.all(diag >= rows * (1 - 1e-12))
    assert np.all(diag >= cols * (1 - 1e-12))


def test_diagonal_dominance_2c_N16():
    ex = get_example("2c")
    A = -assemble_spatial_operator(ex.problem, SpaceGrid(2, 16)).toarray()
    d = np.diag(A)
    assert np.all(d >= np.abs(A).sum(axis=1) - np.abs(d) - 1e-12 * d)


def test_translation_invariance_constant_coefficients():
    L = assemble_spatial_operator(diffusion_problem(dim=2, eps=0.1, p=1.0, q=-2.0), SpaceGrid(2, 6))
    L = L.toarray()
    N = 6
    rows = [i + N * j for i in range(1, N - 1) for j in range(1, N - 1)]
    ref = [L[rows[0], rows[0] + o] for o in (-N, -1, 0, 1, N)]
    for r in rows:
        np.testing.assert_allclose([L[r, r + o] for o in (-N, -1, 0, 1, N)], ref, rtol=1e-14)


def test_rhs_zero_data():
    prob = diffusion_problem(dim=2)
    assert not assemble_rhs_block(prob, SpaceGrid(2, 4), TimeGrid(3, 1.0)).any()


def test_rhs_2a_only_initial_column():
    ex = get_example("2a")
    grid, tg = ex.grids(8, 5)
    F = assemble_rhs_block(ex.problem, grid, tg)
    x, y = grid.coords()
    np.testing.assert_allclose(F[:, 0], x * (x - 1) * y * (y - 1) / tg.tau, rtol=1e-14)
    assert not F[:, 1:].any()


def test_rhs_2d_hot_wall_hand_assembled():
    ex = get_example("2d")
    grid, tg = ex.grids(5, 3)  # N = 4 interior points per direction
    F = assemble_rhs_block(ex.problem, grid, tg)
    h, eps, N = grid.h, 1 / 200, 4
    ref = np.zeros((N * N, 3))
    for j in range(N):
        y = (j + 1) * h
        x = N * h
        p = 2 * y * (1 - x**2)
        w = eps / h**2 + max(-p, 0.0) / h
        for k in range(3):
            ref[N - 1 + N * j, k] = (1 - np.exp(-10 * (k + 1) * tg.tau)) * w
    np.testing.assert_allclose(F, ref, rtol=1e-14, atol=0)


def test_rhs_1d_dirichlet_and_convection():
    ex = get_example("1b")
    grid, tg = ex.grids(8, 2)
    F = assemble_rhs_block(ex.problem, grid, tg)
    w = 0.1 / grid.h**2 + 0.2 / grid.h
    np.testing.assert_allclose(F[0], [w, w], rtol=1e-14)
    assert not F[1:].any()


def test_exact_solution_plug_ins():
    assert get_example("1a").exact(np.array([np.pi / 2]), 0.0)[0] == pytest.approx(np.pi)
    assert get_example("2b").exact(0.0, 0.0, 0.0) == pytest.approx(np.e)
    ex = get_example("2c")
    s = np.linspace(0, 1, 7)
    for t in (0.0, 1.0, 5.0):
        assert np.all(ex.exact(s, np.zeros(7), t) == 0) and np.all(ex.exact(np.ones(7), s, t) == 0)


def test_exact_availability_flags():
    for eid in ("1b", "2d"):
        ex = get_example(eid)
        assert not ex.has_exact
        assert exact_solution_block(eid, *ex.grids(4, 2)) is None
    for eid in ("1a", "2a", "2b", "2c"):
        assert get_example(eid).has_exact


def test_1a_series_matches_initial_data_and_pde():
    ex = get_example("1a")
    x = np.linspace(0.1, np.pi - 0.1, 9)
    np.testing.assert_allclose(ex.exact(x, 1e-6), ex.exact(x, 0.0), atol=2e-3)
    # u_t = eps u_xx away from t = 0
    t, dt, dx = 1.0, 1e-4, 1e-3
    ut = (ex.exact(x, t + dt) - ex.exact(x, t - dt)) / (2 * dt)
    uxx = (ex.exact(x + dx, t) - 2 * ex.exact(x, t) + ex.exact(x - dx, t)) / dx**2
    np.testing.assert_allclose(ut, 0.1 * uxx, atol=1e-5)


def test_2a_series_matches_initial_data():
    ex = get_example("2a")
    x = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(ex.exact(x, x[::-1], 0.0), x * (x - 1) * x[::-1] * (x[::-1] - 1))
    np.testing.assert_allclose(ex.exact(x, x[::-1], 1e-9), ex.exact(x, x[::-1], 0.0), atol=1e-6)


@pytest.mark.parametrize("eid", ["2b", "2c"])
def test_manufactured_source_fd_consistency(eid):
    """Central differences of the exact solution reproduce f, with the
    discrepancy shrinking like step^2."""
    ex = get_example(eid)
    prob, u = ex.problem, ex.exact
    f = manufactured_source(eid)
    pts = np.random.default_rng(7).uniform(0.1, 0.9, (10, 2))
    x, y = pts[:, 0], pts[:, 1]
    t = 0.7

    def residual(d):
        ut = (u(x, y, t + d) - u(x, y, t - d)) / (2 * d)
        ae, aw = prob.a(x + d / 2, y), prob.a(x - d / 2, y)
        an, as_ = prob.a(x, y + d / 2), prob.a(x, y - d / 2)
        div = (ae * (u(x + d, y, t) - u(x, y, t)) - aw * (u(x, y, t) - u(x - d, y, t))
               + an * (u(x, y + d, t) - u(x, y, t)) - as_ * (u(x, y, t) - u(x, y - d, t))) / d**2
        ux = (u(x + d, y, t) - u(x - d, y, t)) / (2 * d)
        uy = (u(x, y + d, t) - u(x, y - d, t)) / (2 * d)
        lhs = ut - div + prob.p(x, y) * ux + prob.q(x, y) * uy
        return np.max(np.abs(lhs - f(x, y, t))) / np.max(np.abs(f(x, y, t)))

    e1, e2 = residual(2.5e-4), residual(1.25e-4)
    assert e2 < 1e-4
    assert 3.5 < e1 / e2 < 4.5


def test_2b_source_decays():
    f = manufactured_source("2b")
    x, y = np.array([0.3]), np.array([0.6])
    assert abs(f(x, y, 20.0)[0] / f(x, y, 10.0)[0] - np.exp(-1)) < 1e-12


def test_2c_source_finite_on_boundary():
    f = manufactured_source("2c")
    s = np.linspace(0, 1, 11)
    assert np.all(np.isfinite(f(s, np.zeros(11), 0.5))) and np.all(np.isfinite(f(np.ones(11), s, 0.5)))
