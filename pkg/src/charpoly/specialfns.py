"""Scalar special functions used throughout the package.

Moments of the weight ``w(lam) = exp(-eps*lam) / sqrt(lam**2 - 1)`` on
``[1, inf)`` are the building blocks of the F_n integrals; the first two are
the Macdonald functions K_0 and K_1.
"""
import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedOrderError

EULER_GAMMA = 0.57721566490153286061

N_MAX = 8
MAX_MOMENT_ORDER = 2 * N_MAX

_SERIES_CUTOFF = 2.0
_EPS = 1e-17


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    return math.lgamma(x)


def _k01_series(x):
    # Power series around 0, valid (and accurate) for x <= 2.
    y = 0.25 * x * x
    lnx2 = math.log(0.5 * x)
    term0 = 1.0   # (x^2/4)^k / (k!)^2
    term1 = 1.0   # (x^2/4)^k / (k! (k+1)!)
    i0 = 0.0
    i1 = 0.0
    harm = 0.0    # H_k
    k0_tail = 0.0
    k1_tail = 0.0
    k = 0
    while True:
        i0 += term0
        i1 += term1
        k0_tail += term0 * harm
        # psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
        k1_tail += term1 * (2.0 * harm + 1.0 / (k + 1) - 2.0 * EULER_GAMMA)
        k += 1
        harm += 1.0 / k
        term0 *= y / (k * k)
        term1 *= y / (k * (k + 1))
        if term0 < _EPS * i0 and term1 < _EPS * i1:
            break
    i1 *= 0.5 * x
    k0 = -(lnx2 + EULER_GAMMA) * i0 + k0_tail
    k1 = 1.0 / x + i1 * lnx2 - 0.25 * x * k1_tail
    return k0, k1


def _k01_scaled_cf(x):
    # Steed's evaluation of Temme's continued fraction for K_0, K_1 (x > 2),
    # returned with the exp(x) factor removed.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, 100000):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise RuntimeError("K_nu continued fraction did not converge")
    h *= a1
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _check_eps(eps):
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError(f"eps must be positive and finite, got {eps!r}")


def bessel_k01_scaled(eps):
    """Return ``(exp(eps)*K_0(eps), exp(eps)*K_1(eps))``."""
    _check_eps(eps)
    if eps <= _SERIES_CUTOFF:
        k0, k1 = _k01_series(eps)
        f = math.exp(eps)
        return k0 * f, k1 * f
    return _k01_scaled_cf(eps)


def bessel_k_scaled(order, eps):
    """exp(eps) * K_order(eps) for order 0 or 1."""
    if order not in (0, 1):
        raise UnsupportedOrderError("only K_0 and K_1 are implemented")
    return bessel_k01_scaled(eps)[order]


def bessel_k(order, eps):
    """Modified Bessel function of the second kind K_0 or K_1.

    Underflows to 0.0 only where K itself is below the double range
    (eps > ~700); use :func:`bessel_k_scaled` there.
    """
    if order not in (0, 1):
        raise UnsupportedOrderError("only K_0 and K_1 are implemented")
    _check_eps(eps)
    if eps <= _SERIES_CUTOFF:
        return _k01_series(eps)[order]
    return _k01_scaled_cf(eps)[order] * math.exp(-eps)


@dataclass(frozen=True)
class WeightedMoment:
    order: int
    epsilon: float
    value: float
    scaled: float  # exp(eps) * value, finite for any eps

    def __float__(self):
        return self.value


def scaled_moments(max_order, eps):
    """exp(eps) * m_k(eps) for k = 0..max_order, as a list.

    Uses the integration-by-parts recurrence
    ``m_{k+1} = m_{k-1} + (k m_k - (k-1) m_{k-2}) / eps``
    which is the derivative chain m_{k+1} = -dm_k/deps written without
    derivatives.
    """
    _check_eps(eps)
    if max_order < 0 or max_order > MAX_MOMENT_ORDER:
        raise UnsupportedOrderError(
            f"moment order must lie in [0, {MAX_MOMENT_ORDER}], got {max_order}")
    k0, k1 = bessel_k01_scaled(eps)
    out = [k0, k1]
    for k in range(1, max_order):
        prev2 = out[k - 2] if k >= 2 else 0.0
        out.append(out[k - 1] + (k * out[k] - (k - 1) * prev2) / eps)
    return out[: max_order + 1]


def weighted_moment(order, eps):
    """m_k(eps) = int_1^inf lam^k exp(-eps lam) (lam^2-1)^(-1/2) dlam."""
    if not isinstance(order, (int,)) or order < 0:
        raise UnsupportedOrderError(f"order must be a non-negative integer, got {order!r}")
    scaled = scaled_moments(order, eps)[order]
    return WeightedMoment(order, float(eps), scaled * math.exp(-eps), scaled)


def g_n_constant(n):
    """Volume constant pi^{n(n+1)/4} / prod_{j=1}^n Gamma(j/2)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.exp(log_g_n_constant(n))


def log_g_n_constant(n):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return n * (n + 1) / 4.0 * math.log(math.pi) - sum(math.lgamma(j / 2.0) for j in range(1, n + 1))
