import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from paradiag_rom.core_linalg import (SingularMatrixError, apply_F_time, apply_Fstar_time, as_csr,
                                      csr_matvec, dense_lu_solve, from_block,
                                      orthonormalize_against, to_block)


def dense_F(K):
    j = np.arange(K)
    return np.exp(2j * np.pi * np.outer(j, j) / K) / np.sqrt(K)


def test_matvec_identity_and_hand_case():
    np.testing.assert_array_equal(csr_matvec(as_csr(sp.identity(2)), np.array([3, 4j])), [3, 4j])
    A = as_csr(np.array([[2.0, 0], [1, 3]]))
    np.testing.assert_array_equal(csr_matvec(A, np.ones(2)), [2, 4])


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        csr_matvec(as_csr(sp.identity(3)), np.ones(2))


def test_matvec_random_against_dense(rng):
    D = rng.standard_normal((10, 10)) * (rng.random((10, 10)) < 0.3)
    x = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    np.testing.assert_allclose(csr_matvec(as_csr(D), x), D @ x, rtol=0, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.9))
def test_matvec_matches_dense_16(seed, fill):
    r = np.random.default_rng(seed)
    D = r.standard_normal((16, 16)) * (r.random((16, 16)) < fill)
    x = r.standard_normal(16) + 1j * r.standard_normal(16)
    np.testing.assert_allclose(csr_matvec(as_csr(D), x), D @ x, rtol=1e-13, atol=1e-13)


def test_csr_canonical():
    A = as_csr(sp.coo_matrix(([1.0, 2.0, 3.0], ([0, 0, 0], [2, 0, 2])), shape=(1, 3)))
    assert list(A.indices) == [0, 2]
    np.testing.assert_array_equal(A.data, [2.0, 4.0])


def test_fourier_small_cases():
    M = np.array([[1.0, 2.0, 3.0]]).T  # K = 1
    np.testing.assert_allclose(apply_F_time(M), M)
    np.testing.assert_allclose(apply_F_time(np.array([[1.0, 0.0]])), [[2**-0.5, 2**-0.5]])


def test_fourier_matches_dense_K12(rng):
    row = rng.standard_normal((3, 12)) + 1j * rng.standard_normal((3, 12))
    F = dense_F(12)
    np.testing.assert_allclose(apply_F_time(row), row @ F.T, atol=1e-12)
    np.testing.assert_allclose(apply_Fstar_time(row), row @ F.conj().T, atol=1e-12)


@pytest.mark.parametrize("K", [1, 2, 3, 8, 12, 640])
def test_fourier_unitary_roundtrip(K, rng):
    M = rng.standard_normal((5, K)) + 1j * rng.standard_normal((5, K))
    back = apply_Fstar_time(apply_F_time(M))
    assert np.linalg.norm(back - M) <= 1e-12 * np.linalg.norm(M)


def test_fourier_rejects_empty():
    with pytest.raises(ValueError):
        apply_F_time(np.zeros((3, 0)))


def test_block_roundtrip(rng):
    v = rng.standard_normal(12)
    S = to_block(v, 4)
    assert S.shape == (3, 4)
    np.testing.assert_array_equal(S[:, 1], v[3:6])
    np.testing.assert_array_equal(from_block(S), v)


def test_dense_lu_cases(rng):
    np.testing.assert_allclose(dense_lu_solve(np.eye(3), np.array([1.0, 2, 3])), [1, 2, 3])
    np.testing.assert_allclose(dense_lu_solve(np.diag([2, 4j]), np.array([2, 4j])), [1, 1])
    A = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20)) + 10 * np.eye(20)
    b = rng.standard_normal(20) + 0j
    assert np.max(np.abs(A @ dense_lu_solve(A, b) - b)) < 1e-10


def test_dense_lu_singular():
    with pytest.raises(SingularMatrixError):
        dense_lu_solve(np.zeros((2, 2)), np.ones(2))


def test_orthonormalize_cases():
    np.testing.assert_allclose(orthonormalize_against(np.array([3.0, 0, 0]), None), [1, 0, 0])
    e1 = np.array([[1.0], [0], [0]], dtype=complex)
    np.testing.assert_allclose(orthonormalize_against(np.array([1.0, 1, 0]), e1), [0, 1, 0], atol=1e-15)
    assert orthonormalize_against(np.array([2.0, 0, 0]), e1) is None
    assert orthonormalize_against(np.zeros(3), e1) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_orthonormalize_property(seed, r):
    g = np.random.default_rng(seed)
    n = 20
    Phi, _ = np.linalg.qr(g.standard_normal((n, r)) + 1j * g.standard_normal((n, r)))
    w = g.standard_normal(n) + 1j * g.standard_normal(n)
    v = orthonormalize_against(w, Phi)
    assert v is not None
    assert np.max(np.abs(Phi.conj().T @ v)) < 1e-10
    assert abs(np.linalg.norm(v) - 1) < 1e-12
