"""Pfaffians of real skew-symmetric matrices."""
import numpy as np


def skew_from_upper(upper):
    """Skew-symmetric matrix built from its strict upper triangle only."""
    a = np.triu(np.asarray(upper, dtype=np.float64), 1)
    return a - a.T


def pfaffian(a):
    """Pfaffian by skew-symmetric Gaussian elimination (Parlett-Reid, LTL^T).

    Partial pivoting on the sub-diagonal column keeps the elimination stable.
    Odd dimension gives 0, the empty matrix gives 1.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("pfaffian needs a square matrix")
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a + a.T)) > 1e-12 * scale:
        raise ValueError("matrix is not skew-symmetric")
    val = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            val = -val
        pivot = a[k, k + 1]
        if pivot == 0.0:
            return 0.0
        val *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(val)


def bordered(a, b):
    """(n+1)x(n+1) skew matrix [[A, b], [-b^T, 0]] used for odd n."""
    n = a.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = a
    out[:n, n] = b
    out[n, :n] = -np.asarray(b)
    return out
