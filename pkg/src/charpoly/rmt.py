"""GOE sampling, spectra, log-domain characteristic polynomials and the
large-N spectral geometry (semicircle density, saddle points, eps scaling).

The ensemble density is proportional to ``exp(-N/(2 J^2) Tr H^2)``, i.e.
diagonal entries have variance J^2/N and off-diagonal entries J^2/(2N).
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _linalg_kernels as _lk
from ._backend import USE_NUMBA
from .errors import DomainError, OutsideBulkError, PreconditionError, SolverFailure

_U64 = 1 << 64
# Distinguishes the dense and tridiagonal samplers inside one Philox key.
_DENSE_LANE = 0
_TRIDIAG_LANE = 1


@dataclass(frozen=True)
class GOEConfig:
    dim: int
    coupling: float = 1.0
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        if not self.coupling > 0:
            raise DomainError(f"coupling must be positive, got {self.coupling!r}")
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not (0 <= v < _U64):
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {v!r}")

    def with_stream(self, stream):
        return GOEConfig(self.dim, self.coupling, self.seed, stream)


@dataclass(frozen=True)
class SpectralParams:
    """mu1 = center + offset/2 + i reg, mu2_star = center - offset/2 - i reg."""

    center: float
    offset: float = 0.0
    reg: float = 0.0

    def __post_init__(self):
        if self.reg < 0:
            raise DomainError(f"reg (delta) must be non-negative, got {self.reg!r}")

    @property
    def mu1(self):
        return complex(self.center + 0.5 * self.offset, self.reg)

    @property
    def mu2_star(self):
        return complex(self.center - 0.5 * self.offset, -self.reg)

    def eps(self, cfg):
        return epsilon_from_params(cfg, self)

    @classmethod
    def from_epsilon(cls, eps, cfg, center=0.0, offset=0.0):
        """Pick delta so that N pi rho(center) delta = eps (eps held fixed across N)."""
        rho = mean_density(center, cfg.coupling)
        return cls(center, offset, eps / (cfg.dim * math.pi * rho))


@dataclass(frozen=True)
class SpectralGeometry:
    rho: float
    q_plus: complex
    q_minus: complex


# -- sampling -----------------------------------------------------------------

def _generator(cfg, index, lane):
    bitgen = np.random.Philox(key=[cfg.seed, cfg.stream], counter=[0, 0, index, lane])
    return np.random.Generator(bitgen)


def sample_goe(cfg, index=0):
    """Draw matrix number ``index`` of the (seed, stream) sub-stream.

    Each matrix owns a disjoint Philox counter block, so any draw can be
    regenerated independently of the others.
    """
    if index < 0:
        raise DomainError("index must be non-negative")
    n = cfg.dim
    rng = _generator(cfg, index, _DENSE_LANE)
    z = rng.standard_normal(n * (n + 1) // 2)
    h = np.empty((n, n))
    iu = np.triu_indices(n, 1)
    scale_off = cfg.coupling / math.sqrt(2.0 * n)
    off = z[n:] * scale_off
    h[iu] = off
    h[(iu[1], iu[0])] = off
    h[np.diag_indices(n)] = z[:n] * (cfg.coupling / math.sqrt(n))
    return h


def sample_goe_tridiagonal(cfg, chunk=0, size=1):
    """Tridiagonal matrices with the same eigenvalue law as :func:`sample_goe`.

    Householder reduction of a GOE matrix leaves Gaussian diagonal entries and
    independent off-diagonal entries distributed as chi_{N-k} * J/sqrt(2N).
    Returns ``(diag, off)`` of shapes ``(size, N)`` and ``(size, N-1)``; chunk
    ``c`` is reproducible on its own.
    """
    n = cfg.dim
    rng = _generator(cfg, chunk, _TRIDIAG_LANE)
    diag = rng.standard_normal((size, n)) * (cfg.coupling / math.sqrt(n))
    dof = np.arange(n - 1, 0, -1, dtype=np.float64)
    off = np.sqrt(rng.chisquare(dof, size=(size, n - 1))) * (cfg.coupling / math.sqrt(2.0 * n))
    return diag, off


# -- spectra ------------------------------------------------------------------

def spectrum(h, method=None):
    """Ascending eigenvalues of a real symmetric matrix.

    ``method`` is ``"householder"`` (own Householder + implicit QL, numba) or
    ``"lapack"``; by default the numba backend uses the former.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("spectrum needs a square matrix")
    if not np.array_equal(h, h.T):
        raise DomainError("spectrum needs a symmetric matrix")
    if method is None:
        method = "householder" if USE_NUMBA else "lapack"
    if method == "householder":
        eigs, status = _lk.eigvalsh_householder(h)
    elif method == "lapack":
        eigs, status = _lk.eigvalsh_lapack(h)
    else:
        raise DomainError(f"unknown eigensolver {method!r}")
    if status < 0 or not np.all(np.isfinite(eigs)):
        raise SolverFailure(f"QL iteration did not converge within {_lk.SWEEPS_PER_DIM}*N sweeps")
    return eigs


def log_char_poly(eigs, mu):
    """sum_i log(mu - lambda_i), principal branch per factor.

    exp() of the result is det(mu - H); the real part is ln|Z|.
    """
    mu = complex(mu)
    if mu.imag == 0.0:
        raise DomainError("log_char_poly needs Im(mu) != 0 (unregularized otherwise)")
    return complex(np.log(mu - np.asarray(eigs, dtype=np.float64)).sum())


def log_char_poly_tridiagonal(diag, off, mu):
    """Batched :func:`log_char_poly` for tridiagonal matrices (Im mu > 0)."""
    mu = complex(mu)
    if mu.imag <= 0.0:
        raise DomainError("tridiagonal recurrence branch needs Im(mu) > 0")
    return _lk.tridiag_logdet_batch(np.atleast_2d(diag), np.atleast_2d(off), mu)


# -- spectral geometry --------------------------------------------------------

def _check_bulk(mu, coupling):
    if not coupling > 0:
        raise DomainError("coupling must be positive")
    if not abs(mu) < coupling * math.sqrt(2.0):
        raise OutsideBulkError(f"|mu| = {abs(mu)} is outside the bulk (J*sqrt(2) = {coupling*math.sqrt(2)})")


def mean_density(mu, coupling=1.0):
    """Semicircle density rho(mu) = sqrt(2J^2 - mu^2) / (pi J^2)."""
    _check_bulk(mu, coupling)
    j2 = coupling * coupling
    return math.sqrt(2.0 * j2 - mu * mu) / (math.pi * j2)


def saddle_points(mu, coupling=1.0):
    _check_bulk(mu, coupling)
    j2 = coupling * coupling
    root = math.sqrt(2.0 * j2 - mu * mu)
    q_plus = complex(root, mu) / (2.0 * j2)
    q_minus = complex(-root, mu) / (2.0 * j2)
    return SpectralGeometry(mean_density(mu, coupling), q_plus, q_minus)


def epsilon_from_params(cfg, sp):
    """eps = -i N pi rho(mu) (mu1 - mu2*) / 2; real N pi rho delta when omega = 0."""
    rho = mean_density(sp.center, cfg.coupling)
    eps = -0.5j * cfg.dim * math.pi * rho * (sp.mu1 - sp.mu2_star)
    if sp.offset == 0.0:
        return complex(eps.real, 0.0)
    return eps


def require_moment_dim(cfg, needed):
    if cfg.dim < needed:
        raise PreconditionError(f"N = {cfg.dim} too small: need N >= {needed}")


def principal_power(log_value, power):
    return cmath.exp(power * log_value)
