"""Monte Carlo estimates of negative moments of GOE characteristic polynomials,
the universal ratio K_n and the large-N theory it is compared with.

All per-sample quantities are carried as complex logarithms
L = sum_i log(mu - lambda_i) (principal branch per factor), so
Z^{-n/2} = exp(-(n/2) L).  Sample values are shifted by a common log-scale
before exponentiation; ``MomentEstimate`` stores mean/stderr in units of
exp(log_scale).
"""
import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import rmt
from .errors import DomainError, PreconditionError
from .fneval import fn_goe
from .specialfns import log_g_n_constant

log = logging.getLogger(__name__)

BLOCKS = 20
MIN_SAMPLES = 100
_TRIDIAG_CHUNK = 8192


@dataclass(frozen=True)
class MomentEstimate:
    kind: str                 # "K1", "K2" or "RATIO"
    n_order: int
    samples: int
    mean: complex             # in units of exp(log_scale)
    stderr: float             # complex standard error of `mean`, same units
    robust_mean: complex      # median of BLOCKS block means, same units
    log_scale: float = 0.0
    heavy_tail: bool = False

    @property
    def log_mean(self):
        return self.log_scale + cmath.log(self.mean)

    @property
    def value(self):
        return self.mean * math.exp(self.log_scale)

    @property
    def abs_stderr(self):
        return self.stderr * math.exp(self.log_scale)


@dataclass(frozen=True)
class SaddlePrediction:
    log_value: complex
    gaussian_width_t: complex
    n_order: int

    @property
    def value(self):
        return cmath.exp(self.log_value)


# -- sampling of log Z ----------------------------------------------------------

def _validate(cfg, sp, n, samples, min_dim, strict=True):
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not sp.reg > 0:
        raise DomainError("delta must be positive (unregularized moments diverge)")
    if samples < MIN_SAMPLES:
        raise PreconditionError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if strict:
        rmt.require_moment_dim(cfg, min_dim)


def log_char_poly_samples(cfg, mu_list, samples, sampler="dense"):
    """Array (samples, len(mu_list)) of sum_i log(mu - lambda_i).

    ``dense``: matrix ``i`` of the (seed, stream) sub-stream, full eigensolve.
    ``tridiagonal``: equal-in-law tridiagonal model, O(N) per sample.
    """
    mu_list = [complex(m) for m in mu_list]
    out = np.empty((samples, len(mu_list)), dtype=np.complex128)
    if sampler == "dense":
        for i in range(samples):
            eigs = rmt.spectrum(rmt.sample_goe(cfg, index=i))
            for j, mu in enumerate(mu_list):
                out[i, j] = np.log(mu - eigs).sum()
        return out
    if sampler != "tridiagonal":
        raise DomainError(f"unknown sampler {sampler!r}")
    for c, start in enumerate(range(0, samples, _TRIDIAG_CHUNK)):
        size = min(_TRIDIAG_CHUNK, samples - start)
        diag, off = rmt.sample_goe_tridiagonal(cfg, chunk=c, size=size)
        upper = {}
        for j, mu in enumerate(mu_list):
            # principal log commutes with conjugation off the cut, so the
            # lower half-plane point reuses the recurrence of its mirror
            key = mu if mu.imag > 0 else mu.conjugate()
            if key not in upper:
                upper[key] = rmt.log_char_poly_tridiagonal(diag, off, key)
            val = upper[key]
            out[start:start + size, j] = val if mu.imag > 0 else np.conj(val)
    return out


def _blocks(x, blocks):
    return np.array_split(x, blocks)


def _complex_median(z):
    z = np.asarray(z)
    return complex(np.median(z.real), np.median(z.imag))


def _mean_stats(x, blocks=BLOCKS):
    s = x.size
    mean = complex(x.mean())
    var = float(np.mean(np.abs(x - mean) ** 2))
    block_means = np.array([b.mean() for b in _blocks(x, blocks)])
    return mean, math.sqrt(var / s), _complex_median(block_means), block_means


def heavy_tail_blocks(block_means, factor=10.0):
    """True when some block mean sits more than ``factor`` robust block
    standard deviations (1.4826 MAD) from the median block mean."""
    z = np.abs(np.asarray(block_means))
    med = np.median(z)
    scale = 1.4826 * np.median(np.abs(z - med))
    if scale == 0.0:
        return bool(np.any(z != med))
    return bool(np.max(np.abs(z - med)) > factor * scale)


def _scaled_exp(logs):
    r = float(np.max(logs.real))
    return np.exp(logs - r), r


# -- estimators -----------------------------------------------------------------

def estimate_K1(cfg, sp, n, samples, sampler="dense", strict=True):
    """<Z(mu1)^{-n/2}> with Z = det(mu1 - H).

    The dimension precondition N >= n+1 is where the large-N theory applies;
    ``strict=False`` drops it (the average itself is finite for any delta > 0).
    """
    _validate(cfg, sp, n, samples, n + 1, strict)
    logs = log_char_poly_samples(cfg, [sp.mu1], samples, sampler)[:, 0]
    return _moment_from_logs(-0.5 * n * logs, n, "K1")


def estimate_K1_conjugate(cfg, sp, n, samples, sampler="dense", strict=True):
    """<Z(mu2*)^{-n/2}> on the same draws."""
    _validate(cfg, sp, n, samples, n + 1, strict)
    logs = log_char_poly_samples(cfg, [sp.mu2_star], samples, sampler)[:, 0]
    return _moment_from_logs(-0.5 * n * logs, n, "K1")


def estimate_K2(cfg, sp, n, samples, sampler="dense", strict=True):
    """<[Z(mu1) Z(mu2*)]^{-n/2}>; equals <|Z(mu1)|^{-n}> when omega = 0."""
    _validate(cfg, sp, n, samples, 2 * n + 1, strict)
    logs = log_char_poly_samples(cfg, [sp.mu1, sp.mu2_star], samples, sampler)
    return _moment_from_logs(-0.5 * n * (logs[:, 0] + logs[:, 1]), n, "K2")


def _moment_from_logs(ell, n, kind):
    x, r = _scaled_exp(ell)
    mean, se, robust, _ = _mean_stats(x)
    return MomentEstimate(kind, n, x.size, mean, se, robust, r)


def ratio_from_logs(log1, log2, n, blocks=BLOCKS):
    """Ratio estimator on shared draws, given per-sample log Z(mu1), log Z(mu2*)."""
    s = log1.size
    a, _ = _scaled_exp(-0.5 * n * log1)
    b, _ = _scaled_exp(-0.5 * n * log2)
    c = a * b
    am, bm, cm = a.mean(), b.mean(), c.mean()
    ratio = complex(cm / (am * bm))
    g = c / cm - a / am - b / bm
    se = abs(ratio) * math.sqrt(float(np.mean(np.abs(g - g.mean()) ** 2)) / s)
    block_ratios = [blk_c.mean() / (blk_a.mean() * blk_b.mean())
                    for blk_a, blk_b, blk_c in zip(_blocks(a, blocks), _blocks(b, blocks),
                                                   _blocks(c, blocks))]
    c_blocks = np.array([blk.mean() for blk in _blocks(c, blocks)])
    heavy = heavy_tail_blocks(c_blocks)
    if heavy:
        log.warning("numerator block means disperse beyond 10 robust block sigmas (heavy tail)")
    return MomentEstimate("RATIO", n, s, ratio, se, _complex_median(block_ratios), 0.0, heavy)


def estimate_ratio_Kn(cfg, sp, n, samples, sampler="dense", strict=True):
    """K_n estimate: <[Z(mu1)Z(mu2*)]^{-n/2}> / (<Z(mu1)^{-n/2}> <Z(mu2*)^{-n/2}>).

    All three averages come from the same draws; the standard error is the
    first-order (delta-method) propagation.  n = 0 returns exactly 1.
    """
    if n == 0:
        return MomentEstimate("RATIO", 0, samples, 1.0 + 0j, 0.0, 1.0 + 0j)
    _validate(cfg, sp, n, samples, 2 * n + 1, strict)
    logs = log_char_poly_samples(cfg, [sp.mu1, sp.mu2_star], samples, sampler)
    return ratio_from_logs(logs[:, 0], logs[:, 1], n)


# -- theory -----------------------------------------------------------------------

def log_ratio_constant(cfg, mu, n):
    """log C = n^2 log(pi rho J) + (n^2/2) log(N/2) + (n/2) log(2 pi) - log n! - 2 sum log G(j/2)."""
    rho = rmt.mean_density(mu, cfg.coupling)
    return (n * n * math.log(math.pi * rho * cfg.coupling)
            + 0.5 * n * n * math.log(cfg.dim / 2.0)
            + 0.5 * n * math.log(2.0 * math.pi)
            - math.lgamma(n + 1)
            - 2.0 * sum(math.lgamma(j / 2.0) for j in range(1, n + 1)))


def predicted_ratio(cfg, sp, n, method="auto", tol=1e-9):
    """Large-N prediction C * F_n^GOE(eps) for omega = 0 (real eps)."""
    if n == 0:
        return 1.0 + 0j
    eps = rmt.epsilon_from_params(cfg, sp)
    if sp.offset != 0.0:
        raise DomainError("predicted_ratio needs omega = 0 (F_n is evaluated for real eps only)")
    f = fn_goe(n, eps.real, method=method, tol=tol)
    return complex(math.exp(log_ratio_constant(cfg, sp.center, n)) * f.value, 0.0)


def log_mehta_integral(n, t):
    """log of int_{R^n} prod_{i<j} |x_i - x_j| exp(-(t/2) sum x^2) dx (principal branch in t)."""
    t = complex(t)
    if not t.real > 0:
        raise DomainError("Mehta integral needs Re t > 0")
    const = 0.5 * n * math.log(2.0 * math.pi) + sum(
        math.lgamma(1.0 + 0.5 * j) - math.lgamma(1.5) for j in range(1, n + 1))
    return const - (0.5 * n + 0.25 * n * (n - 1)) * cmath.log(t)


def mehta_integral_quadrature(n, t):
    """Direct quadrature of the Mehta integral for real t > 0 and n <= 3."""
    from scipy import integrate

    if n > 3:
        raise DomainError("quadrature cross-check is limited to n <= 3")
    if n == 1:
        val = integrate.quad(lambda x: math.exp(-0.5 * t * x * x), -np.inf, np.inf,
                             epsabs=0, epsrel=1e-12)[0]
        return val
    # ordered region x_1 < x_2 < ... < x_n, times n!
    if n == 2:
        f = lambda x1, x2: (x2 - x1) * math.exp(-0.5 * t * (x1 * x1 + x2 * x2))
        val = integrate.nquad(f, [lambda x2: (-np.inf, x2), (-np.inf, np.inf)],
                              opts={"epsabs": 0, "epsrel": 1e-11})[0]
        return 2.0 * val
    f = lambda x1, x2, x3: ((x2 - x1) * (x3 - x1) * (x3 - x2)
                            * math.exp(-0.5 * t * (x1 * x1 + x2 * x2 + x3 * x3)))
    val = integrate.nquad(f, [lambda x2, x3: (-np.inf, x2), lambda x3: (-np.inf, x3),
                              (-np.inf, np.inf)], opts={"epsabs": 0, "epsrel": 1e-9})[0]
    return 6.0 * val


def saddle_point_K1(cfg, sp, n):
    """Large-N saddle-point value of <Z(mu1)^{-n/2}>.

    C~ q_+^{n(N-n-1)/2} exp(-(N n/2)(J^2 q_+^2 - 2 i mu1 q_+)) * Mehta(t),
    t = N (1 + 2 J^2 q_+^2) / (2 q_+^2), with
    C~ = G_n/n! * (-iN)^{Nn/2} pi^{-n(n-1)/4} / prod_{j<n} Gamma((N-j)/2).
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    rmt.require_moment_dim(cfg, n + 1)
    big_n = cfg.dim
    j2 = cfg.coupling ** 2
    q = rmt.saddle_points(sp.center, cfg.coupling).q_plus
    mu1 = sp.mu1
    t = big_n * (1.0 + 2.0 * j2 * q * q) / (2.0 * q * q)
    # (-iN)^{Nn/2}: the Gaussian representation fixes (-i)^{1/2} = exp(-i pi/4)
    log_c = (log_g_n_constant(n) - math.lgamma(n + 1)
             + 0.5 * big_n * n * complex(math.log(big_n), -0.5 * math.pi)
             - 0.25 * n * (n - 1) * math.log(math.pi)
             - sum(math.lgamma(0.5 * (big_n - j)) for j in range(n)))
    log_val = (log_c + 0.5 * n * (big_n - n - 1) * cmath.log(q)
               - 0.5 * big_n * n * (j2 * q * q - 2j * mu1 * q)
               + log_mehta_integral(n, t))
    return SaddlePrediction(complex(log_val), complex(t), n)
