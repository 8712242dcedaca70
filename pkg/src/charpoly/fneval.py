"""Numerical evaluation of the F_n integrals.

    F_n^GOE(eps) = e^{n eps} int_{[1,inf)^n} prod dlam (lam^2-1)^{-1/2}
                   prod_{i<j} |lam_i - lam_j| e^{-eps sum lam}
    F_n^GUE(eps) = same with dlam instead of the inverse square root and the
                   Vandermonde squared.

Two independent routes are provided for the GOE integral: nested quadrature
over the ordered simplex in psi = arccosh(lam), and a de Bruijn Pfaffian of
pairwise sign-weighted double integrals.  Also here: the truncated small-eps
form, the derivative reduction of eps^{n(n-1)/2} F_n, and the cluster
integrals I_p.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _quad_kernels as qk
from .errors import AccuracyFailure, DivergenceError, DomainError, UnsupportedOrderError
from .pfaffian import bordered, pfaffian, skew_from_upper
from .specialfns import N_MAX, bessel_k_scaled

EPS_MIN = 1e-7
EPS_MAX = 1e3
TOL_MIN = 1e-10
GUE_QUAD_MAX_N = 5
TRUNCATED_MAX_N = 4
CLUSTER_MAX_P = 4

_PANEL_LADDER = (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128)
_GL_ORDER = 12
_LEAF_BUDGET = 8e7


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    PFAFFIAN = "pfaffian"
    CLOSED_FORM = "closed-form"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class FnEvaluation:
    n_order: int
    epsilon: float
    value: float
    abs_error: float
    method: Method

    @property
    def rel_error(self):
        return self.abs_error / abs(self.value) if self.value else math.inf


@dataclass(frozen=True)
class ClusterResult:
    p: int
    k: float
    cutoff_X: float
    epsilon: float
    i_value: float
    m_exponent: float
    abs_error: float = 0.0
    method: Method = Method.QUADRATURE

    @property
    def m_value(self):
        """p-cluster contribution M_p with proportionality constant 1."""
        return self.epsilon ** self.m_exponent * self.i_value


@dataclass(frozen=True)
class DerivativeResult:
    n_order: int
    epsilon: float
    value: float              # dF~_n / d eps
    scaled: float             # eps * dF~_n / d eps
    limit_coefficient: float  # eps -> 0 limit of `scaled`
    abs_error: float


# -- helpers ------------------------------------------------------------------

def _check_n(n, cap):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n > cap:
        raise UnsupportedOrderError(f"n = {n} exceeds the supported maximum {cap}")


def _check_eps(eps, lo=EPS_MIN, hi=EPS_MAX):
    if isinstance(eps, complex):
        raise DomainError("complex eps is not supported")
    if not (lo <= eps <= hi):
        raise DomainError(f"eps = {eps!r} outside the supported range [{lo}, {hi}]")


def _check_tol(tol):
    if not tol >= TOL_MIN:
        raise DomainError(f"tol must be >= {TOL_MIN}, got {tol!r}")


def tail_cutoff(tol, degree):
    """L with exp(-L) L^degree <= 1e-3 tol: where the exponential weight is cut."""
    base = math.log(1e3 / tol)
    cut = base
    for _ in range(50):
        cut = base + degree * math.log(max(cut, 1.0))
    return cut


def goe_psi_max(eps, tol, n):
    # cosh(psi) - 1 = 2 sinh^2(psi/2) = L / eps
    return 2.0 * math.asinh(math.sqrt(tail_cutoff(tol, n - 1) / (2.0 * eps)))


def _adaptive_simplex(kind, n, upper, tol, eps=0.0, k=0.0, lo=0.0, power=1):
    """Refine the panel count until two successive rules agree to rel. tol."""
    prev = None
    best = None
    for panels in _PANEL_LADDER:
        if (panels * _GL_ORDER) ** n > _LEAF_BUDGET:
            break
        cur = qk.simplex_integral(kind, n, upper, panels, _GL_ORDER, eps, k, lo, power)
        if prev is not None:
            err = abs(cur - prev)
            best = (cur, err)
            if err <= tol * abs(cur):
                return cur, err
        prev = cur
    if best is None:
        raise AccuracyFailure("quadrature budget exhausted before a second rule", prev, math.inf)
    raise AccuracyFailure(f"tolerance {tol} not reached (achieved {best[1] / abs(best[0]):.2e})",
                          best[0], best[1])


# -- GOE: quadrature ----------------------------------------------------------

def fn_goe_quadrature(n, eps, tol=1e-9, samples=400_000, seed=0):
    """F_n^GOE by nested simplex quadrature (n <= 3) or importance-sampled MC.

    psi = arccosh(lam) removes the inverse square root; the integrand is
    symmetric so the ordered simplex is integrated and multiplied by n!.
    ``tol`` is relative; for the Monte Carlo branch abs_error = 3 stderr.
    """
    _check_n(n, N_MAX)
    _check_eps(eps)
    _check_tol(tol)
    if n >= 4:
        return fn_goe_monte_carlo(n, eps, samples=samples, seed=seed)
    upper = goe_psi_max(eps, tol, n)
    val, err = _adaptive_simplex(qk.GOE, n, upper, tol, eps=eps)
    f = math.factorial(n)
    return FnEvaluation(n, float(eps), f * val, f * err, Method.QUADRATURE)


def sample_weight_lambda(eps, size, rng):
    """Draw lam >= 1 with density proportional to exp(-eps lam) / sqrt(lam^2 - 1).

    x = lam - 1 is proposed from Gamma(1/2, scale 1/eps) and accepted with
    probability sqrt(2 / (x + 2)).  Returns x (not lam) to keep differences exact.
    """
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        batch = max(64, int(need * 1.2 / min(1.0, math.sqrt(2.0 * eps) + 0.05)))
        x = rng.gamma(0.5, 1.0 / eps, size=batch)
        keep = x[rng.random(batch) < np.sqrt(2.0 / (x + 2.0))]
        take = min(keep.size, need)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def fn_goe_monte_carlo(n, eps, samples=400_000, seed=0, chunk=50_000):
    """Importance sampling with the one-body weight as proposal.

    Each coordinate follows the n = 1 weight exactly, so the estimator is
    F_1(eps)^n * E|Delta(lam)| and has finite variance.
    """
    _check_n(n, N_MAX)
    _check_eps(eps)
    rng = np.random.Generator(np.random.Philox(key=[seed, n]))
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = np.stack([sample_weight_lambda(eps, m, rng) for _ in range(n)], axis=1)
        vdm = np.ones(m)
        for i in range(n):
            for j in range(i + 1, n):
                vdm *= np.abs(x[:, i] - x[:, j])
        total += vdm.sum()
        total_sq += np.dot(vdm, vdm)
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    f1n = bessel_k_scaled(0, eps) ** n
    return FnEvaluation(n, float(eps), float(f1n * mean), 3.0 * f1n * math.sqrt(var / samples),
                        Method.MONTE_CARLO)


# -- GOE: Pfaffian ------------------------------------------------------------

def _pfaffian_matrix(n, eps, upper, panels, order=_GL_ORDER):
    """Sign-weighted double integrals A_ij and border b_i on one panel grid.

    Basis phi_i = t^(i-1), t = eps (lam - 1) = 2 eps sinh^2(psi/2); with
    weight exp(-t) dpsi.  A_ij = int dpsi_y phi_j w [2 M_i(psi_y) - b_i] with
    the partial moments M_i(psi) = int_0^psi phi_i w.
    """
    gx, gw = np.polynomial.legendre.leggauss(order)
    gx = 0.5 * (gx + 1.0)
    gw = 0.5 * gw
    h = upper / panels
    starts = np.arange(panels) * h
    y = (starts[:, None] + h * gx[None, :])                    # (P, m)
    wy = np.broadcast_to(h * gw, y.shape)

    def basis(psi):
        t = 2.0 * eps * np.sinh(0.5 * psi) ** 2
        w = np.exp(-t)
        return np.stack([t ** i * w for i in range(n)], axis=-1)   # (..., n)

    fy = basis(y)                                              # (P, m, n)
    panel_int = np.einsum("pm,pmi->pi", wy, fy)                # (P, n)
    before = np.cumsum(panel_int, axis=0) - panel_int          # full panels to the left
    # partial panel: int_{start}^{y} on a GL rule of the same order
    span = y - starts[:, None]                                 # (P, m)
    sub = starts[:, None, None] + span[:, :, None] * gx[None, None, :]
    fsub = basis(sub)                                          # (P, m, m, n)
    part = np.einsum("pmk,pmki->pmi", span[:, :, None] * gw[None, None, :], fsub)
    partial = before[:, None, :] + part                        # M_i(y), (P, m, n)
    b = panel_int.sum(axis=0)
    a = np.einsum("pm,pmj,pmi->ij", wy, fy, 2.0 * partial - b[None, None, :])
    return a, b


def _pfaffian_value(n, eps, upper, panels):
    a, b = _pfaffian_matrix(n, eps, upper, panels)
    a = skew_from_upper(a)
    pf = pfaffian(a) if n % 2 == 0 else pfaffian(bordered(a, b))
    logscale = math.lgamma(n + 1) - 0.5 * n * (n - 1) * math.log(eps)
    return pf * math.exp(logscale)


def fn_goe_pfaffian(n, eps, tol=1e-10):
    """F_n^GOE = n! eps^{-n(n-1)/2} Pf(A) (even n) or Pf of the bordered matrix (odd n)."""
    _check_n(n, N_MAX)
    _check_eps(eps)
    _check_tol(tol)
    upper = goe_psi_max(eps, tol, n)
    prev = None
    for panels in _PANEL_LADDER[1:]:
        cur = _pfaffian_value(n, eps, upper, panels)
        if prev is not None:
            err = abs(cur - prev)
            if err <= tol * abs(cur):
                return FnEvaluation(n, float(eps), cur, err, Method.PFAFFIAN)
        prev = cur
    raise AccuracyFailure("Pfaffian route did not converge", cur, err)


def fn_goe(n, eps, method="auto", tol=1e-9):
    """Dispatch: quadrature for n <= 3, Pfaffian above, unless ``method`` forces one."""
    method = Method(method) if method != "auto" else (
        Method.QUADRATURE if n <= 3 else Method.PFAFFIAN)
    if method is Method.QUADRATURE:
        return fn_goe_quadrature(n, eps, tol)
    if method is Method.PFAFFIAN:
        return fn_goe_pfaffian(n, eps, max(tol, TOL_MIN))
    if method is Method.MONTE_CARLO:
        return fn_goe_monte_carlo(n, eps)
    if method is Method.CLOSED_FORM and n == 1:
        return FnEvaluation(1, float(eps), bessel_k_scaled(0, eps), 0.0, Method.CLOSED_FORM)
    raise DomainError(f"method {method.value} is not available for GOE n = {n}")


# -- GUE ----------------------------------------------------------------------

def fn_gue_closed_form(n, eps):
    """eps^{-n^2} prod_{j<n} j! (j+1)!; exact integer product while it fits, else log domain."""
    log_val = (-n * n * math.log(eps)
               + sum(math.lgamma(j + 1) + math.lgamma(j + 2) for j in range(n)))
    if n <= 12 and abs(n * n * math.log(eps)) < 600:
        prod = math.prod(math.factorial(j) * math.factorial(j + 1) for j in range(n))
        return float(prod) / eps ** (n * n)
    if log_val > 709.0:
        raise DomainError(f"F_{n}^GUE({eps}) overflows double precision (log value {log_val:.1f})")
    return math.exp(log_val)


def fn_gue(n, eps, mode="closed-form", tol=1e-9):
    _check_n(n, 10 ** 6)
    if not eps > 0:
        raise DomainError("eps must be positive")
    mode = Method(mode)
    if mode is Method.CLOSED_FORM:
        return FnEvaluation(n, float(eps), fn_gue_closed_form(n, eps), 0.0, Method.CLOSED_FORM)
    if mode is not Method.QUADRATURE:
        raise DomainError(f"GUE mode must be closed-form or quadrature, got {mode.value}")
    if n > GUE_QUAD_MAX_N:
        raise UnsupportedOrderError(f"GUE quadrature supports n <= {GUE_QUAD_MAX_N}")
    _check_tol(tol)
    upper = tail_cutoff(tol, 2 * (n - 1)) / eps
    val, err = _adaptive_simplex(qk.GUE, n, upper, tol, eps=eps, power=2)
    f = math.factorial(n)
    return FnEvaluation(n, float(eps), f * val, f * err, Method.QUADRATURE)


# -- small-eps forms ----------------------------------------------------------

def _check_small_eps(eps):
    if eps == 0:
        raise DivergenceError("lower limit 0: the y-integrals diverge logarithmically")
    if not (0 < eps <= 0.1):
        raise DomainError(f"truncated form needs 0 < eps <= 0.1, got {eps!r}")


def fn_goe_truncated(n, eps, tol=1e-9):
    """eps^{-n(n-1)/2} int_eps^inf prod dy/y |Delta(y)| e^{-sum y}  (y = eps e^u)."""
    _check_n(n, TRUNCATED_MAX_N)
    _check_small_eps(eps)
    _check_tol(tol)
    upper = math.log(tail_cutoff(tol, n - 1) / eps)
    val, err = _adaptive_simplex(qk.LOGY, n, upper, tol, eps=eps)
    f = math.factorial(n) * eps ** (-0.5 * n * (n - 1))
    return FnEvaluation(n, float(eps), f * val, f * err, Method.QUADRATURE)


def derivative_limit(n):
    """lim_{eps->0} eps dF~_n/deps = -n prod_{j=0}^{n-2} G((3+j)/2) G((2+j)/2) / G(3/2)."""
    _check_n(n, 10 ** 6)
    log_prod = sum(math.lgamma((3 + j) / 2) + math.lgamma((2 + j) / 2) - math.lgamma(1.5)
                   for j in range(n - 1))
    return -n * math.exp(log_prod)


def ftilde_derivative(n, eps, tol=1e-9):
    """d/deps of F~_n = eps^{n(n-1)/2} F_n(eps<<1) through the (n-1)-fold reduction

        eps dF~_n/deps = -n e^{-eps} int_eps^inf prod_{k>=2} dy_k/y_k e^{-y_k}
                         (y_k - eps) prod_{2<=k<l} |y_k - y_l|.
    """
    _check_n(n, TRUNCATED_MAX_N)
    _check_small_eps(eps)
    _check_tol(tol)
    if n == 1:
        inner, err = 1.0, 0.0
    else:
        m = n - 1
        upper = math.log(tail_cutoff(tol, m) / eps)
        val, err = _adaptive_simplex(qk.DERIV, m, upper, tol, eps=eps)
        f = math.factorial(m)
        inner, err = f * val, f * err
    pref = -n * math.exp(-eps)
    scaled = pref * inner
    return DerivativeResult(n, float(eps), scaled / eps, scaled, derivative_limit(n),
                            abs(pref) * err / eps)


# -- cluster integrals --------------------------------------------------------

def _cluster_mc(p, k, s_max, samples, seed, strata_per_dim=None):
    if strata_per_dim is None:
        strata_per_dim = max(2, int((samples / 16) ** (1.0 / p)))
    m = strata_per_dim
    n_strata = m ** p
    per = max(2, samples // n_strata)
    h = 2.0 * s_max / m
    rng = np.random.Generator(np.random.Philox(key=[seed, 1000 + p]))
    grid = np.stack(np.meshgrid(*[np.arange(m)] * p, indexing="ij"), axis=-1).reshape(-1, p)
    total = 0.0
    var = 0.0
    vol = h ** p
    for start in range(0, n_strata, 4096):
        cells = grid[start:start + 4096]
        s = -s_max + h * (cells[:, None, :] + rng.random((cells.shape[0], per, p)))
        u = np.sinh(s)
        f = np.prod(np.cosh(s) ** (1.0 - k), axis=-1)
        for i in range(p):
            for j in range(i + 1, p):
                f = f * np.abs(u[..., i] - u[..., j])
        total += vol * f.mean(axis=1).sum()
        var += (vol ** 2 * f.var(axis=1, ddof=1) / per).sum()
    return float(total), math.sqrt(var)


def cluster_integral(p, k, X=1.0, eps=1e-3, tol=1e-9, samples=1_000_000, seed=0):
    """I_p = int_{[-X/eps, X/eps]^p} prod du |Delta(u)| / prod (u^2+1)^{k/2}.

    u = sinh(s) turns du (u^2+1)^{-k/2} into cosh(s)^{1-k} ds.  p <= 2 uses the
    simplex quadrature; p in {3, 4} stratified Monte Carlo (abs_error = 3 stderr).
    """
    _check_n(p, CLUSTER_MAX_P)
    if not k > 0:
        raise DomainError("k must be positive")
    if not X > 0:
        raise DomainError("X must be positive")
    if not (0 < eps < X):
        raise DomainError("need 0 < eps < X")
    s_max = math.asinh(X / eps)
    m_exp = p * (p + 1) / 2.0 - p * k
    if p <= 2:
        _check_tol(tol)
        val, err = _adaptive_simplex(qk.CLUSTER, p, 2.0 * s_max, tol, k=k, lo=-s_max)
        f = math.factorial(p)
        return ClusterResult(p, float(k), float(X), float(eps), f * val, m_exp, f * err,
                             Method.QUADRATURE)
    val, se = _cluster_mc(p, k, s_max, samples, seed)
    return ClusterResult(p, float(k), float(X), float(eps), val, m_exp, 3.0 * se,
                         Method.MONTE_CARLO)
