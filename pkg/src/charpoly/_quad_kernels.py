"""Nested Gauss-Legendre quadrature over an ordered simplex.

Integrates   prod_k w(s_k) * prod_{i<j} |x(s_i) - x(s_j)|^power
over  0 <= s_1 <= ... <= s_n <= S,  where each inner variable gets a
composite Gauss-Legendre rule mapped onto [0, s_{k+1}].  The integrand is
smooth on the simplex (the absolute value never switches sign there), so the
rule converges exponentially in the number of panels.

Integrand kinds (``kind``), with params = (eps, k, lo):
  GOE      s = psi, w = exp(-eps (cosh psi - 1)),   x = cosh psi
  GUE      s = x = lam - 1, w = exp(-eps x),         power 2
  LOGY     s = u, y = eps e^u, w = exp(-y),           x = y
  DERIV    as LOGY but w = exp(-y) (y - eps)
  CLUSTER  s = lo + r, w = cosh(s)^(1-k),             x = sinh s
Differences are evaluated in product form so that nearly coincident points
do not lose digits.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

GOE = 0
GUE = 1
LOGY = 2
DERIV = 3
CLUSTER = 4

# reassociation and fast transcendentals; inf/nan semantics are kept
_FAST = {"reassoc", "contract", "arcp", "nsz", "afn"}


def gauss_legendre_composite(panels, order):
    """Composite Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    h = 1.0 / panels
    starts = np.arange(panels) * h
    nodes = (starts[:, None] + h * x[None, :]).ravel()
    weights = np.tile(h * w, panels)
    return nodes, weights


@njit(cache=True, fastmath=_FAST)
def _weight(kind, s, eps, k, lo):
    if kind == GOE:
        sh = math.sinh(0.5 * s)
        return math.exp(-2.0 * eps * sh * sh)
    if kind == GUE:
        return math.exp(-eps * s)
    if kind == LOGY:
        return math.exp(-eps * math.exp(s))
    if kind == DERIV:
        return math.exp(-eps * math.exp(s)) * eps * math.expm1(s)
    # CLUSTER
    return math.cosh(lo + s) ** (1.0 - k)


@njit(cache=True, fastmath=_FAST)
def _diff(kind, a, b, eps, lo):
    if kind == GOE:
        return 2.0 * math.sinh(0.5 * (a + b)) * math.sinh(0.5 * abs(a - b))
    if kind == GUE:
        return abs(a - b)
    if kind == LOGY or kind == DERIV:
        return -eps * math.exp(max(a, b)) * math.expm1(-abs(a - b))
    return 2.0 * math.cosh(lo + 0.5 * (a + b)) * math.sinh(0.5 * abs(a - b))


@njit(cache=True, fastmath=_FAST)
def _simplex_nb(kind, n, upper, nodes, weights, eps, k, lo, power):
    m = nodes.shape[0]
    idx = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    prod = np.zeros(n + 1)
    prod[n] = 1.0
    total = 0.0
    level = n - 1
    while True:
        # fill levels down to 1, then sweep the innermost variable in one loop
        for d in range(level, 0, -1):
            top = upper if d == n - 1 else s[d + 1]
            x = top * nodes[idx[d]]
            s[d] = x
            f = top * weights[idx[d]] * _weight(kind, x, eps, k, lo)
            for j in range(d + 1, n):
                f *= _pow(_diff(kind, x, s[j], eps, lo), power)
            prod[d] = prod[d + 1] * f
        top = upper if n == 1 else s[1]
        row = 0.0
        for i in range(m):
            x = top * nodes[i]
            f = weights[i] * _weight(kind, x, eps, k, lo)
            for j in range(1, n):
                f *= _pow(_diff(kind, x, s[j], eps, lo), power)
            row += f
        total += prod[1] * top * row
        d = 1
        while d < n and idx[d] == m - 1:
            idx[d] = 0
            d += 1
        if d >= n:
            break
        idx[d] += 1
        level = d
    return total


@njit(cache=True)
def _pow(g, power):
    if power == 1.0:
        return g
    if power == 2.0:
        return g * g
    return g ** power


def _weight_np(kind, s, eps, k, lo):
    if kind == GOE:
        return np.exp(-2.0 * eps * np.sinh(0.5 * s) ** 2)
    if kind == GUE:
        return np.exp(-eps * s)
    if kind == LOGY:
        return np.exp(-eps * np.exp(s))
    if kind == DERIV:
        return np.exp(-eps * np.exp(s)) * eps * np.expm1(s)
    return np.cosh(lo + s) ** (1.0 - k)


def _diff_np(kind, a, b, eps, lo):
    if kind == GOE:
        return 2.0 * np.sinh(0.5 * (a + b)) * np.sinh(0.5 * np.abs(a - b))
    if kind == GUE:
        return np.abs(a - b)
    if kind in (LOGY, DERIV):
        return -eps * np.exp(np.maximum(a, b)) * np.expm1(-np.abs(a - b))
    return 2.0 * np.cosh(lo + 0.5 * (a + b)) * np.sinh(0.5 * np.abs(a - b))


def _simplex_np(kind, n, upper, nodes, weights, eps, k, lo, power):
    # Python loop over the outermost variable, broadcasting over the rest.
    total = 0.0
    for xt, wt in zip(nodes, weights):
        s_top = upper * xt
        f_top = upper * wt * _weight_np(kind, s_top, eps, k, lo)
        vals = [np.asarray(s_top)]
        factor = np.asarray(f_top)
        for level in range(1, n):
            outer = vals[-1]
            shape = outer.shape + (nodes.size,)
            expand = (...,) + (None,)
            sv = outer[expand] * nodes.reshape((1,) * outer.ndim + (-1,))
            wv = outer[expand] * weights.reshape((1,) * outer.ndim + (-1,))
            fv = wv * _weight_np(kind, sv, eps, k, lo)
            for prev in vals:
                pv = prev.reshape(prev.shape + (1,) * (len(shape) - prev.ndim))
                fv = fv * _diff_np(kind, sv, pv, eps, lo) ** power
            factor = factor[expand] * fv
            vals.append(sv)
        total += float(np.sum(factor))
    return total


def simplex_integral(kind, n, upper, panels, order=12, eps=0.0, k=0.0, lo=0.0,
                     power=1, use_numba=None):
    """Ordered-simplex integral with a fixed composite rule (no factorial).

    By default numba runs n <= 2 only: from n = 3 on the cost is dominated by
    exp/sinh calls, where numpy's vectorised math beats scalar calls.
    """
    if use_numba is None:
        use_numba = USE_NUMBA and n <= 2
    nodes, weights = gauss_legendre_composite(panels, order)
    if use_numba:
        return _simplex_nb(kind, n, float(upper), nodes, weights, float(eps),
                           float(k), float(lo), float(power))
    return _simplex_np(kind, n, float(upper), nodes, weights, float(eps),
                       float(k), float(lo), power)
