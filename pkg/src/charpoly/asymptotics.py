"""Leading asymptotic laws of F_n^GOE, the divergence exponent nu(k), and
least-squares fits of power/log laws to evaluated data."""
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import rmt
from .errors import DomainError, FitError, NoDivergence


class Regime(str, enum.Enum):
    SMALL_EPS = "small-eps"
    LARGE_EPS = "large-eps"


@dataclass(frozen=True)
class AsymptoticLaw:
    """constant * eps^{-power_exponent} * ln(1/eps)^{log_power}."""

    power_exponent: float
    log_power: int
    constant: float
    regime: Regime

    def __post_init__(self):
        if not self.constant > 0:
            raise DomainError("law constant must be positive")
        if self.log_power not in (0, 1):
            raise DomainError("log_power must be 0 or 1")

    def log_value(self, eps):
        out = math.log(self.constant) - self.power_exponent * math.log(eps)
        if self.log_power:
            out += math.log(math.log(1.0 / eps))
        return out

    def value(self, eps):
        return math.exp(self.log_value(eps))


@dataclass(frozen=True)
class CrossoverFit:
    exponent: float
    constant: float
    residual: float
    offset: float = 0.0     # additive b of a*ln(1/eps) + b (log fits only)


def nu_exponent(k):
    """nu(k) = int(k) * (k - (1 + int(k))/2); k(k-1)/2 at integers."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    p = math.floor(k)
    return p * (k - 0.5 * (1 + p))


def dominant_cluster(k):
    """(p, at_crossover): p-clusters dominate for p <= k < p + 1."""
    if not k >= 1:
        raise NoDivergence(f"k = {k} < 1: the moment stays finite as eps -> 0")
    p = math.floor(k)
    return int(p), bool(p == k)


def _check_order(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def small_eps_law(n):
    """F_n ~ c_n eps^{-n(n-1)/2} ln(1/eps), with
    c_n = 2^{n-1} pi^{-n/2} n prod_{j<n} Gamma(1 + j/2) Gamma((j+1)/2)."""
    n = _check_order(n)
    log_c = ((n - 1) * math.log(2.0) - 0.5 * n * math.log(math.pi) + math.log(n)
             + sum(math.lgamma(1 + 0.5 * j) + math.lgamma(0.5 * (j + 1)) for j in range(n)))
    return AsymptoticLaw(0.5 * n * (n - 1), 1, math.exp(log_c), Regime.SMALL_EPS)


def large_eps_law(n):
    """F_n ~ n! (2 pi)^{-n/2} [prod_{j=1}^n Gamma(j/2)]^2 eps^{-n^2/2}."""
    n = _check_order(n)
    log_c = (math.lgamma(n + 1) - 0.5 * n * math.log(2.0 * math.pi)
             + 2.0 * sum(math.lgamma(0.5 * j) for j in range(1, n + 1)))
    return AsymptoticLaw(0.5 * n * n, 0, math.exp(log_c), Regime.LARGE_EPS)


def perturbative_ratio(n, mu, J, mu1, mu2_star):
    """K_n far from the universal regime: (pi rho J / (-i (mu1 - mu2*) / J))^{n^2/2}."""
    n = _check_order(n)
    rho = rmt.mean_density(mu, J)
    gap = complex(mu1) - complex(mu2_star)
    if not gap.imag > 0:
        raise DomainError("need Im(mu1 - mu2*) > 0")
    base = math.pi * rho * J / (-1j * gap / J)
    return complex(np.exp(0.5 * n * n * np.log(base)))


def _prepare(points):
    pts = sorted((float(e), float(v)) for e, v in points)
    if len(pts) < 5:
        raise FitError(f"need at least 5 points, got {len(pts)}")
    eps = np.array([p[0] for p in pts])
    val = np.array([p[1] for p in pts])
    if np.any(eps <= 0) or np.any(val <= 0) or not np.all(np.isfinite(val)):
        raise FitError("fit needs positive eps and positive finite values")
    if math.log10(eps[-1] / eps[0]) < 2.0 - 1e-12:
        raise FitError("eps grid must span at least 2 decades")
    return eps, val


def crossover_fit(points, with_log=False):
    """Fit value = c eps^{-p} (power law) or eps^{-p} (a ln(1/eps) + b) (with_log).

    Residual is the RMS of ln(value) - ln(model).  In the log model the
    constant is a and ``offset`` is b; p is found by a bounded 1-D search
    with a, b solved linearly for each trial p.
    """
    eps, val = _prepare(points)
    inv = -np.log(eps)
    y = np.log(val)
    if not with_log:
        design = np.column_stack([inv, np.ones_like(inv)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coef
        return CrossoverFit(float(coef[0]), float(math.exp(coef[1])),
                            float(np.sqrt(np.mean(resid ** 2))))
    if np.any(eps >= 1.0):
        raise FitError("log model needs eps < 1")

    def solve(p):
        scaled = val * eps ** p
        # relative least squares: rows weighted by 1/scaled
        design = np.column_stack([inv, np.ones_like(inv)]) / scaled[:, None]
        coef, *_ = np.linalg.lstsq(design, np.ones_like(inv), rcond=None)
        model = (coef[0] * inv + coef[1]) * eps ** (-p)
        if np.any(model <= 0):
            return coef, math.inf
        return coef, float(np.sqrt(np.mean((y - np.log(model)) ** 2)))

    # the misfit is not unimodal in p: coarse scan, then local refinement
    grid = np.arange(-10.0, 10.0 + 1e-9, 0.01)
    p0 = float(grid[int(np.argmin([solve(p)[1] for p in grid]))])
    res = minimize_scalar(lambda p: solve(p)[1], bounds=(p0 - 0.01, p0 + 0.01),
                          method="bounded", options={"xatol": 1e-10})
    coef, rms = solve(res.x)
    if not coef[0] > 0 or not math.isfinite(rms):
        raise FitError("log-law fit produced a non-positive constant")
    return CrossoverFit(float(res.x), float(coef[0]), rms, float(coef[1]))
