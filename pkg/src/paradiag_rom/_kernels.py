"""Compiled loops for the shifted systems (sigma I - L) x = b.

All kernels take canonical CSR arrays (sorted columns) plus ``diagptr``,
the position of the diagonal entry in every row.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def diag_positions(indptr, indices):
    n = indptr.size - 1
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = -1
        for kk in range(indptr[i], indptr[i + 1]):
            if indices[kk] == i:
                out[i] = kk
                break
    return out


@njit(cache=True)
def csr_matvec(indptr, indices, data, x):
    n = indptr.size - 1
    y = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0j
        for kk in range(indptr[i], indptr[i + 1]):
            acc += data[kk] * x[indices[kk]]
        y[i] = acc
    return y


@njit(cache=True)
def residual(indptr, indices, data, x, b):
    n = indptr.size - 1
    r = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = b[i]
        for kk in range(indptr[i], indptr[i + 1]):
            acc -= data[kk] * x[indices[kk]]
        r[i] = acc
    return r


@njit(cache=True)
def gs_forward(indptr, indices, data, diagptr, b, x):
    n = indptr.size - 1
    for i in range(n):
        acc = b[i]
        for kk in range(indptr[i], indptr[i + 1]):
            if kk != diagptr[i]:
                acc -= data[kk] * x[indices[kk]]
        x[i] = acc / data[diagptr[i]]


@njit(cache=True)
def gs_backward(indptr, indices, data, diagptr, b, x):
    n = indptr.size - 1
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for kk in range(indptr[i], indptr[i + 1]):
            if kk != diagptr[i]:
                acc -= data[kk] * x[indices[kk]]
        x[i] = acc / data[diagptr[i]]


@njit(cache=True)
def ilu0(indptr, indices, data, diagptr):
    """ILU(0) in the sparsity pattern of A; L (unit) and U share ``lu``."""
    n = indptr.size - 1
    lu = data.copy()
    pos = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for kk in range(indptr[i], indptr[i + 1]):
            pos[indices[kk]] = kk
        for kk in range(indptr[i], diagptr[i]):
            k = indices[kk]
            piv = lu[diagptr[k]]
            if piv == 0:
                raise ZeroDivisionError("zero pivot in ILU(0)")
            lu[kk] /= piv
            for kp in range(diagptr[k] + 1, indptr[k + 1]):
                p = pos[indices[kp]]
                if p >= 0:
                    lu[p] -= lu[kk] * lu[kp]
        for kk in range(indptr[i], indptr[i + 1]):
            pos[indices[kk]] = -1
    return lu


@njit(cache=True)
def ilu0_solve(indptr, indices, lu, diagptr, b):
    n = indptr.size - 1
    y = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = b[i]
        for kk in range(indptr[i], diagptr[i]):
            acc -= lu[kk] * y[indices[kk]]
        y[i] = acc
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for kk in range(diagptr[i] + 1, indptr[i + 1]):
            acc -= lu[kk] * y[indices[kk]]
        y[i] = acc / lu[diagptr[i]]
    return y


@njit(cache=True)
def thomas_shifted(lower, diag, upper, shifts, B):
    """Solve (shifts[m] I - T) X[:, m] = B[:, m] for tridiagonal T.

    ``lower[i]`` = T[i+1, i], ``diag[i]`` = T[i, i], ``upper[i]`` = T[i, i+1].
    """
    n, m = B.shape
    X = np.empty((n, m), dtype=np.complex128)
    c = np.empty(n, dtype=np.complex128)
    for col in range(m):
        s = shifts[col]
        beta = s - diag[0]
        if beta == 0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        X[0, col] = B[0, col] / beta
        for i in range(1, n):
            c[i - 1] = -upper[i - 1] / beta
            beta = (s - diag[i]) + lower[i - 1] * c[i - 1]
            if beta == 0:
                raise ZeroDivisionError("zero pivot in tridiagonal solve")
            X[i, col] = (B[i, col] + lower[i - 1] * X[i - 1, col]) / beta
        for i in range(n - 2, -1, -1):
            X[i, col] -= c[i] * X[i + 1, col]
    return X
