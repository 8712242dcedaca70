import cmath
import math

import numpy as np
import pytest

from charpoly import rmt
from charpoly.errors import DomainError, OutsideBulkError, PreconditionError


def test_config_validation():
    with pytest.raises(DomainError):
        rmt.GOEConfig(0)
    with pytest.raises(DomainError):
        rmt.GOEConfig(3, coupling=0.0)
    with pytest.raises(DomainError):
        rmt.GOEConfig(3, seed=-1)
    with pytest.raises(DomainError):
        rmt.SpectralParams(0.0, 0.0, -1.0)


def test_sample_reproducible_and_symmetric():
    cfg = rmt.GOEConfig(7, 1.3, seed=42, stream=9)
    a, b = rmt.sample_goe(cfg, 3), rmt.sample_goe(cfg, 3)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a - a.T, np.zeros_like(a))
    assert not np.array_equal(a, rmt.sample_goe(cfg, 4))
    assert not np.array_equal(a, rmt.sample_goe(cfg.with_stream(10), 3))


def test_entry_variances():
    cfg = rmt.GOEConfig(1, 1.0, seed=1)
    h = np.array([rmt.sample_goe(cfg, i)[0, 0] for i in range(100_000)])
    se = math.sqrt(2.0 / h.size)   # stderr of a Gaussian sample variance
    assert abs(h.var() - 1.0) < 3 * se
    cfg = rmt.GOEConfig(6, 2.0, seed=2)
    hs = np.array([rmt.sample_goe(cfg, i) for i in range(20_000)])
    diag_var = hs[:, np.arange(6), np.arange(6)].var()
    off_var = hs[:, 0, 1:].var()
    assert diag_var == pytest.approx(4.0 / 6, rel=0.03)
    assert off_var == pytest.approx(4.0 / 12, rel=0.03)


def test_trace_square_mean():
    cfg = rmt.GOEConfig(50, 1.0, seed=3)
    tr = np.array([np.sum(rmt.sample_goe(cfg, i) ** 2) for i in range(10_000)])
    assert abs(tr.mean() - 25.5) < 3 * tr.std(ddof=1) / math.sqrt(tr.size)


def test_streams_uncorrelated():
    a = rmt.GOEConfig(10, seed=4, stream=0)
    b = a.with_stream(1)
    x = np.array([np.sum(rmt.sample_goe(a, i) ** 2) for i in range(4000)])
    y = np.array([np.sum(rmt.sample_goe(b, i) ** 2) for i in range(4000)])
    r = np.corrcoef(x, y)[0, 1]
    assert abs(r) < 3 / math.sqrt(x.size)


def test_tridiagonal_model_same_spectrum_law():
    cfg = rmt.GOEConfig(8, 1.0, seed=5)
    d, o = rmt.sample_goe_tridiagonal(cfg, 0, 20_000)
    tr_t = (d ** 2).sum(1) + 2 * (o ** 2).sum(1)
    tr_d = np.array([np.sum(rmt.sample_goe(cfg, i) ** 2) for i in range(20_000)])
    se = math.hypot(tr_t.std(), tr_d.std()) / math.sqrt(20_000)
    assert abs(tr_t.mean() - tr_d.mean()) < 3 * se
    assert tr_t.mean() == pytest.approx(4.5, rel=0.02)


@pytest.mark.parametrize("method", ["householder", "lapack"])
def test_spectrum_examples(method):
    np.testing.assert_allclose(rmt.spectrum(np.diag([3.0, 1.0, 2.0]), method), [1, 2, 3])
    np.testing.assert_allclose(rmt.spectrum(np.array([[0.0, 1.0], [1.0, 0.0]]), method), [-1, 1])


def test_spectrum_trace_and_agreement():
    for i, n in enumerate([1, 2, 5, 20, 64]):
        h = rmt.sample_goe(rmt.GOEConfig(n, seed=6), i)
        ev = rmt.spectrum(h, "householder")
        assert np.all(np.diff(ev) >= 0)
        assert abs(ev.sum() - np.trace(h)) <= 1e-10 * n * np.abs(h).max()
        np.testing.assert_allclose(ev, np.linalg.eigvalsh(h), atol=1e-12 * max(1, np.abs(ev).max()))


def test_spectrum_rejects_asymmetric():
    with pytest.raises(DomainError):
        rmt.spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_log_char_poly_matches_determinant():
    h = rmt.sample_goe(rmt.GOEConfig(10, seed=7), 0)
    mu = complex(0.3, 0.05)
    val = rmt.log_char_poly(rmt.spectrum(h), mu)
    det = np.linalg.det(mu * np.eye(10) - h)
    assert cmath.exp(val) == pytest.approx(det, rel=1e-10)
    with pytest.raises(DomainError):
        rmt.log_char_poly([0.0], 1.0)


def test_log_char_poly_continuous_path():
    step = 1e-3
    ev = rmt.spectrum(rmt.sample_goe(rmt.GOEConfig(4, seed=8), 0))
    path = np.arange(-2.0, 2.0, step) + 0.5j
    vals = np.array([rmt.log_char_poly(ev, m) for m in path])
    assert np.max(np.abs(np.diff(vals.imag))) < 1e-2
    # close to the axis the phase is steep but still bounded by step * N / Im(mu),
    # far below a 2 pi branch jump
    ev = rmt.spectrum(rmt.sample_goe(rmt.GOEConfig(30, seed=8), 1))
    path = np.arange(-1.6, 1.6, step) + 0.01j
    vals = np.array([rmt.log_char_poly(ev, m) for m in path])
    assert np.max(np.abs(np.diff(vals.imag))) <= step * 30 / 0.01


def test_tridiagonal_logdet_matches_dense():
    cfg = rmt.GOEConfig(12, seed=9)
    d, o = rmt.sample_goe_tridiagonal(cfg, 0, 5)
    mu = complex(-0.2, 0.03)
    got = rmt.log_char_poly_tridiagonal(d, o, mu)
    for s in range(5):
        t = np.diag(d[s]) + np.diag(o[s], 1) + np.diag(o[s], -1)
        assert got[s] == pytest.approx(rmt.log_char_poly(np.linalg.eigvalsh(t), mu), abs=1e-11)
    with pytest.raises(DomainError):
        rmt.log_char_poly_tridiagonal(d, o, mu.conjugate())


def test_mean_density():
    assert rmt.mean_density(0.0, 1.0) == pytest.approx(0.4501581580785531, rel=1e-12)
    assert rmt.mean_density(1.414213, 1.0) < 1e-3
    assert rmt.mean_density(0.7) == rmt.mean_density(-0.7)
    with pytest.raises(OutsideBulkError):
        rmt.mean_density(1.5, 1.0)


def test_empirical_density():
    cfg = rmt.GOEConfig(200, seed=10)
    eigs = np.concatenate([rmt.spectrum(rmt.sample_goe(cfg, i)) for i in range(1000)])
    edges = np.linspace(-1, 1, 21)
    counts, _ = np.histogram(eigs, edges)
    a = math.sqrt(2.0)
    cdf = lambda x: (x * math.sqrt(2 - x * x) / 2 + math.asin(x / a)) / math.pi
    expected = eigs.size * np.diff([cdf(x) for x in edges])
    assert np.all(np.abs(counts - expected) <= 3 * np.sqrt(expected))


@pytest.mark.parametrize("mu, coupling", [(0.0, 1.0), (1.0, 1.0), (-0.4, 0.8), (2.0, 3.0)])
def test_saddle_invariants(mu, coupling):
    g = rmt.saddle_points(mu, coupling)
    assert (g.q_plus + g.q_plus.conjugate()).real == pytest.approx(math.pi * g.rho, abs=1e-12)
    assert abs(g.q_plus * g.q_plus.conjugate() - 1 / (2 * coupling ** 2)) < 1e-12
    assert g.q_plus.real > 0


def test_saddle_examples():
    g = rmt.saddle_points(0.0, 1.0)
    assert g.q_plus == pytest.approx(1 / math.sqrt(2))
    assert g.q_minus == pytest.approx(-1 / math.sqrt(2))
    assert rmt.saddle_points(1.0, 1.0).q_plus == pytest.approx(0.5 + 0.5j)


def test_epsilon():
    cfg = rmt.GOEConfig(100)
    eps = rmt.epsilon_from_params(cfg, rmt.SpectralParams(0.0, 0.0, 0.01))
    assert eps.imag == 0.0 and eps.real == pytest.approx(math.sqrt(2), rel=1e-12)
    assert rmt.epsilon_from_params(cfg, rmt.SpectralParams(0.0, 0.0, 0.0)) == 0
    sp = rmt.SpectralParams.from_epsilon(2.5, cfg, center=0.3)
    assert sp.eps(cfg).real == pytest.approx(2.5, rel=1e-12)
    assert sp.mu1.imag == sp.reg and sp.mu2_star.imag == -sp.reg


def test_require_moment_dim():
    with pytest.raises(PreconditionError):
        rmt.require_moment_dim(rmt.GOEConfig(2), 3)
