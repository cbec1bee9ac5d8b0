"""Small linear-algebra primitives shared by the solvers.

Sparse matrices are ``scipy.sparse.csr_matrix`` in canonical form (sorted,
duplicate-free column indices).  A "column block" is a 2D ndarray of shape
``(n_space, K)`` whose column ``k`` holds the spatial vector at time step
``k + 1``; ``block.T.ravel()`` is the stacked space-time vector.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.sparse as sp


class SingularMatrixError(np.linalg.LinAlgError):
    pass


def as_csr(A) -> sp.csr_matrix:
    """Return ``A`` as a canonical CSR matrix (sorted columns, no duplicates)."""
    A = sp.csr_matrix(A)
    A.sum_duplicates()
    A.sort_indices()
    return A


def csr_matvec(A: sp.csr_matrix, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: matrix has {A.shape[1]} columns, vector has shape {x.shape}")
    # scipy's csr kernel walks each row in stored (ascending) column order
    return A @ x


def to_block(v: np.ndarray, K: int) -> np.ndarray:
    """Stacked space-time vector -> ``(n_space, K)`` column block (a view)."""
    return np.asarray(v).reshape(K, -1).T


def from_block(S: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(S.T).ravel()


def apply_F_time(M: np.ndarray) -> np.ndarray:
    """Multiply every row of ``M`` by the unitary Fourier matrix with
    entries ``exp(+2 pi i jk / K) / sqrt(K)``.

    The positive exponent makes this the orthonormal *inverse* DFT.
    """
    M = np.asarray(M)
    if M.shape[-1] == 0:
        raise ValueError("K must be at least 1")
    return scipy.fft.ifft(M, axis=-1, norm="ortho")


def apply_Fstar_time(M: np.ndarray) -> np.ndarray:
    """Conjugate transpose of :func:`apply_F_time` (orthonormal forward DFT)."""
    M = np.asarray(M)
    if M.shape[-1] == 0:
        raise ValueError("K must be at least 1")
    return scipy.fft.fft(M, axis=-1, norm="ortho")


def dense_lu_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    with warnings.catch_warnings():
        # a zero pivot is reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    if np.any(np.diag(lu) == 0):
        raise SingularMatrixError("zero pivot in LU factorization")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def orthonormalize_against(w: np.ndarray, Phi: np.ndarray | None, *, rtol: float = 1e-10):
    """Two passes of modified Gram-Schmidt of ``w`` against the columns of ``Phi``.

    Returns the normalized remainder, or ``None`` when ``w`` lies (numerically)
    in the span of ``Phi``.
    """
    v = np.array(w, dtype=complex)
    wnorm = np.linalg.norm(v)
    if wnorm == 0.0:
        return None
    if Phi is not None and Phi.shape[1] > 0:
        for _ in range(2):
            for j in range(Phi.shape[1]):
                phi = Phi[:, j]
                v -= np.vdot(phi, v) * phi
    vnorm = np.linalg.norm(v)
    if vnorm < rtol * wnorm:
        return None
    return v / vnorm
