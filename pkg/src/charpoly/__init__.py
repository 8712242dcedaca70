"""Negative moments of GOE characteristic polynomials.

Monte Carlo estimates of the moments and of the universal ratio K_n, the
integral F_n that K_n reduces to, and the small/large-eps laws of F_n.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"

from ._backend import backend_name
from .asymptotics import (crossover_fit, dominant_cluster, large_eps_law, nu_exponent,
                          perturbative_ratio, small_eps_law)
from .fneval import (cluster_integral, fn_goe, fn_goe_pfaffian, fn_goe_quadrature,
                     fn_goe_truncated, fn_gue, ftilde_derivative)
from .montecarlo import (estimate_K1, estimate_K2, estimate_ratio_Kn, predicted_ratio,
                         saddle_point_K1)
from .rmt import GOEConfig, SpectralParams, sample_goe, spectrum

__all__ = [
    "GOEConfig", "SpectralParams", "backend_name", "cluster_integral", "crossover_fit",
    "dominant_cluster", "estimate_K1", "estimate_K2", "estimate_ratio_Kn", "fn_goe",
    "fn_goe_pfaffian", "fn_goe_quadrature", "fn_goe_truncated", "fn_gue", "ftilde_derivative",
    "large_eps_law", "nu_exponent", "perturbative_ratio", "predicted_ratio", "sample_goe",
    "saddle_point_K1", "small_eps_law", "spectrum",
]
