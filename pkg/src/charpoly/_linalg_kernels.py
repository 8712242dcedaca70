"""Eigenvalue and log-determinant kernels.

numba path: Householder reduction to tridiagonal form followed by implicit
QL with Wilkinson-type shifts (eigenvalues only).
numpy path: LAPACK through ``numpy.linalg.eigvalsh``.

The batched tridiagonal log-determinant uses the ratio recurrence
r_k = (mu - a_k) - b_{k-1}^2 / r_{k-1}.  For Im mu > 0 every r_k stays in the
open upper half-plane, so sum(log r_k) with principal logs coincides with
sum(log(mu - lambda_i)) (both are continuous in mu and agree as mu -> i*inf).
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

DEFLATE_TOL = 1e-14
SWEEPS_PER_DIM = 50


@njit(cache=True)
def _householder_tridiag_nb(a):
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(n)
    v = np.empty(n)
    p = np.empty(n)
    for k in range(n - 2):
        m = n - k - 1
        norm = 0.0
        for i in range(m):
            x = a[k + 1 + i, k]
            v[i] = x
            norm += x * x
        norm = math.sqrt(norm)
        d[k] = a[k, k]
        if norm == 0.0:
            e[k] = 0.0
            continue
        alpha = -norm if v[0] >= 0.0 else norm
        e[k] = alpha
        v[0] -= alpha
        vn = 0.0
        for i in range(m):
            vn += v[i] * v[i]
        vn = math.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        # p = 2 A22 v
        for i in range(m):
            s = 0.0
            for j in range(m):
                s += a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = 2.0 * s
        vp = 0.0
        for i in range(m):
            vp += v[i] * p[i]
        for i in range(m):
            p[i] -= vp * v[i]
        for i in range(m):
            vi = v[i]
            pi = p[i]
            for j in range(m):
                a[k + 1 + i, k + 1 + j] -= vi * p[j] + pi * v[j]
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2]
        e[n - 2] = a[n - 1, n - 2]
    d[n - 1] = a[n - 1, n - 1]
    e[n - 1] = 0.0
    return d, e


@njit(cache=True)
def _tql_nb(d, e, tol, max_iter):
    """Implicit QL on (d, e); e[i] couples d[i] and d[i+1].  Returns status."""
    n = d.shape[0]
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return total


@njit(cache=True)
def _eigvalsh_nb(h, tol, max_iter):
    a = h.copy()
    d, e = _householder_tridiag_nb(a)
    status = _tql_nb(d, e, tol, max_iter)
    d.sort()
    return d, status


def eigvalsh_householder(h):
    """Eigenvalues (ascending) by Householder + implicit QL; status < 0 on failure."""
    h = np.ascontiguousarray(h, dtype=np.float64)
    n = h.shape[0]
    return _eigvalsh_nb(h, DEFLATE_TOL, SWEEPS_PER_DIM * max(n, 1))


def eigvalsh_lapack(h):
    return np.linalg.eigvalsh(h), 0


@njit(cache=True)
def _tridiag_logdet_nb(diag, off, mu):
    s, n = diag.shape
    out = np.empty(s, dtype=np.complex128)
    for k in range(s):
        r = mu - diag[k, 0]
        acc = np.log(r)
        for i in range(1, n):
            b = off[k, i - 1]
            r = (mu - diag[k, i]) - b * b / r
            acc += np.log(r)
        out[k] = acc
    return out


def _tridiag_logdet_np(diag, off, mu):
    r = mu - diag[:, 0]
    acc = np.log(r)
    for i in range(1, diag.shape[1]):
        b = off[:, i - 1]
        r = (mu - diag[:, i]) - b * b / r
        acc = acc + np.log(r)
    return acc


def tridiag_logdet_batch(diag, off, mu, use_numba=None):
    """sum_i log(mu - lambda_i) for a batch of symmetric tridiagonal matrices."""
    use_numba = USE_NUMBA if use_numba is None else use_numba
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    if off.shape[1] == 0:
        off = np.zeros((diag.shape[0], 1))
    if use_numba:
        return _tridiag_logdet_nb(diag, off, complex(mu))
    return _tridiag_logdet_np(diag, off, complex(mu))
