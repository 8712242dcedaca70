import cmath
import math

import numpy as np
import pytest

from charpoly import montecarlo as mc
from charpoly import rmt
from charpoly.errors import DomainError, PreconditionError
from charpoly.fneval import fn_goe
from oracles import exact_log_k1_n1, inverse_resolvent_n1


def test_single_entry_oracle():
    # N = 1, mu1 = i, n = 2: E[(i - h)^{-1}] with h ~ N(0, 1)
    cfg = rmt.GOEConfig(1, 1.0, seed=1)
    sp = rmt.SpectralParams(0.0, 0.0, 1.0)
    est = mc.estimate_K1(cfg, sp, 2, 1_000_000, sampler="tridiagonal", strict=False)
    ref = inverse_resolvent_n1(1j)
    assert abs(est.value - ref) < 3 * est.abs_stderr
    dense = mc.estimate_K1(cfg, sp, 2, 20_000, strict=False)
    assert abs(dense.value - ref) < 3 * dense.abs_stderr


def test_dimension_precondition():
    cfg = rmt.GOEConfig(2)
    sp = rmt.SpectralParams(0.0, 0.0, 0.5)
    with pytest.raises(PreconditionError):
        mc.estimate_K1(cfg, sp, 2, 1000)
    with pytest.raises(PreconditionError):
        mc.estimate_ratio_Kn(rmt.GOEConfig(4), sp, 2, 1000)
    with pytest.raises(PreconditionError):
        mc.estimate_K1(rmt.GOEConfig(5), sp, 1, 50)
    with pytest.raises(DomainError):
        mc.estimate_K1(rmt.GOEConfig(5), rmt.SpectralParams(0.0, 0.0, 0.0), 1, 1000)


def test_far_from_spectrum():
    cfg = rmt.GOEConfig(10, seed=2)
    sp = rmt.SpectralParams(0.0, 0.0, 100.0)
    est = mc.estimate_K1(cfg, sp, 1, 500)
    lead = sp.mu1 ** (-1 * 10 / 2)
    assert abs(est.value / lead - 1) < 0.01


def test_disjoint_streams_agree():
    cfg = rmt.GOEConfig(20, seed=3)
    sp = rmt.SpectralParams(0.2, 0.0, 0.05)
    a = mc.estimate_K1(cfg, sp, 1, 4000)
    b = mc.estimate_K1(cfg.with_stream(1), sp, 1, 4000)
    assert a.log_scale != b.log_scale or a.mean != b.mean
    assert abs(a.value - b.value) < 3 * math.hypot(a.abs_stderr, b.abs_stderr)


def test_reproducible():
    cfg = rmt.GOEConfig(12, seed=4)
    sp = rmt.SpectralParams(0.0, 0.0, 0.1)
    for sampler in ("dense", "tridiagonal"):
        a = mc.estimate_ratio_Kn(cfg, sp, 1, 300, sampler)
        b = mc.estimate_ratio_Kn(cfg, sp, 1, 300, sampler)
        assert a == b


def test_conjugate_moment():
    cfg = rmt.GOEConfig(16, seed=5)
    sp = rmt.SpectralParams(0.1, 0.0, 0.05)
    a = mc.estimate_K1(cfg, sp, 1, 2000)
    same = mc.estimate_K1_conjugate(cfg, sp, 1, 2000)
    assert same.value == pytest.approx(a.value.conjugate(), rel=1e-12)
    other = mc.estimate_K1_conjugate(cfg.with_stream(7), sp, 1, 2000)
    assert abs(other.value - a.value.conjugate()) < 3 * math.hypot(a.abs_stderr, other.abs_stderr)


def test_numerator_is_modulus_power():
    cfg = rmt.GOEConfig(9, seed=6)
    sp = rmt.SpectralParams(0.0, 0.0, 0.02)
    logs = mc.log_char_poly_samples(cfg, [sp.mu1, sp.mu2_star], 200)
    num = np.exp(-0.5 * 2 * (logs[:, 0] + logs[:, 1]))
    assert np.all(np.abs(num.imag) <= 1e-12 * num.real)
    np.testing.assert_allclose(num.real, np.exp(-2 * logs[:, 0].real), rtol=1e-12)
    k2 = mc.estimate_K2(cfg, sp, 2, 200)
    assert k2.value.real == pytest.approx(num.real.mean(), rel=1e-12)


def test_ratio_n0_and_reality():
    cfg = rmt.GOEConfig(11, seed=7)
    sp = rmt.SpectralParams(0.0, 0.0, 0.05)
    assert mc.estimate_ratio_Kn(cfg, sp, 0, 100).mean == 1.0
    r = mc.estimate_ratio_Kn(cfg, sp, 1, 3000, "tridiagonal")
    assert abs(r.mean.imag) <= 3 * r.stderr
    assert r.robust_mean.real == pytest.approx(r.mean.real, rel=0.1)


def test_tridiagonal_matches_dense_sampler():
    cfg = rmt.GOEConfig(10, seed=8)
    sp = rmt.SpectralParams.from_epsilon(1.0, cfg)
    d = mc.estimate_ratio_Kn(cfg, sp, 1, 20_000, "dense")
    t = mc.estimate_ratio_Kn(cfg, sp, 1, 200_000, "tridiagonal")
    assert abs(d.mean - t.mean) < 3 * math.hypot(d.stderr, t.stderr)


def test_finite_size_convergence():
    # deviation from C F_1 shrinks with N at fixed eps (about 0.25/N here)
    eps = math.sqrt(2.0)
    devs = []
    for big_n in (6, 12, 24):
        cfg = rmt.GOEConfig(big_n, seed=9)
        sp = rmt.SpectralParams.from_epsilon(eps, cfg)
        r = mc.estimate_ratio_Kn(cfg, sp, 1, 600_000, "tridiagonal")
        pred = mc.predicted_ratio(cfg, sp, 1).real
        devs.append((r.mean.real / pred - 1, r.stderr / pred))
    for (d1, s1), (d2, s2) in zip(devs, devs[1:]):
        assert abs(d1) - abs(d2) > 2 * math.hypot(s1, s2)


def test_stderr_scaling():
    cfg = rmt.GOEConfig(20, seed=10)
    sp = rmt.SpectralParams(0.0, 0.0, 0.2)
    a = mc.estimate_K1(cfg, sp, 1, 100_000, "tridiagonal")
    b = mc.estimate_K1(cfg, sp, 1, 200_000, "tridiagonal")
    ratio = (a.abs_stderr / abs(a.value)) / (b.abs_stderr / abs(b.value))
    assert ratio == pytest.approx(math.sqrt(2), rel=0.15)


def test_heavy_tail_flag():
    rng = np.random.default_rng(0)
    logs = rng.normal(0, 0.1, 4000) + 0j
    assert not mc.ratio_from_logs(logs, logs.conjugate(), 1).heavy_tail
    spiky = logs.copy()
    spiky[17] = -40.0          # |Z| tiny once: |Z|^{-1} dwarfs everything else
    assert mc.ratio_from_logs(spiky, spiky.conjugate(), 1).heavy_tail


def test_against_exact_n1_moment():
    cfg = rmt.GOEConfig(60, seed=11)
    sp = rmt.SpectralParams(0.3, 0.0, 0.02)
    est = mc.estimate_K1(cfg, sp, 1, 200_000, "tridiagonal")
    exact = exact_log_k1_n1(60, 1.0, sp.mu1)
    diff = cmath.exp(exact - est.log_mean) - 1
    assert abs(diff) < 3 * est.stderr / abs(est.mean)


# -- theory ---------------------------------------------------------------------------

def test_constant_n1():
    cfg = rmt.GOEConfig(100)
    c = math.exp(mc.log_ratio_constant(cfg, 0.0, 1))
    assert c == pytest.approx(7.9788456, rel=1e-7)
    rho = rmt.mean_density(0.4, 1.3)
    c2 = math.exp(mc.log_ratio_constant(rmt.GOEConfig(37, 1.3), 0.4, 1))
    assert c2 == pytest.approx(rho * 1.3 * math.sqrt(math.pi * 37), rel=1e-12)


def test_predicted_ratio():
    cfg = rmt.GOEConfig(100)
    sp = rmt.SpectralParams.from_epsilon(1.0, cfg)
    assert mc.predicted_ratio(cfg, sp, 1).real == pytest.approx(7.9788456 * 1.1444631, rel=1e-6)
    for n in range(1, 5):
        v = mc.predicted_ratio(cfg, sp, n)
        assert v.real > 0 and v.imag == 0
    assert mc.predicted_ratio(cfg, sp, 0) == 1
    with pytest.raises(DomainError):
        mc.predicted_ratio(cfg, rmt.SpectralParams(0.0, 0.01, 0.01), 1)


def test_mehta_closed_form():
    assert math.exp(mc.log_mehta_integral(1, 2.5).real) == pytest.approx(math.sqrt(2 * math.pi / 2.5))
    assert math.exp(mc.log_mehta_integral(2, 1.0).real) == pytest.approx(4 * math.sqrt(math.pi), rel=1e-14)
    for n, t in [(2, 1.0), (2, 3.7), (3, 2.0)]:
        quad = mc.mehta_integral_quadrature(n, t)
        assert math.exp(mc.log_mehta_integral(n, t).real) == pytest.approx(quad, rel=1e-6)
    with pytest.raises(DomainError):
        mc.log_mehta_integral(2, -1.0)


def test_saddle_width():
    widths = [mc.saddle_point_K1(rmt.GOEConfig(n), rmt.SpectralParams(0, 0, 0.01), 1).gaussian_width_t
              for n in (50, 100, 200)]
    for w, n in zip(widths, (50, 100, 200)):
        assert w.imag == 0 and w.real == pytest.approx(2.0 * n)


def test_saddle_against_exact_n1():
    # with N delta fixed the residual is a clean O(1/N) correction, phase included
    for mu in (0.0, 0.5):
        scaled = []
        for big_n in (100, 200, 400):
            cfg = rmt.GOEConfig(big_n)
            sp = rmt.SpectralParams(mu, 0.0, 1.0 / big_n)
            sad = mc.saddle_point_K1(cfg, sp, 1)
            exact = exact_log_k1_n1(big_n, 1.0, sp.mu1)
            scaled.append(big_n * abs(cmath.exp(sad.log_value - exact) - 1))
        assert max(scaled) < 1.5
        assert max(scaled) - min(scaled) < 0.05 * max(scaled)


def test_saddle_errors():
    with pytest.raises(PreconditionError):
        mc.saddle_point_K1(rmt.GOEConfig(2), rmt.SpectralParams(0, 0, 0.1), 2)
    with pytest.raises(DomainError):
        mc.saddle_point_K1(rmt.GOEConfig(10), rmt.SpectralParams(2.0, 0, 0.1), 1)


def test_fn_used_by_prediction_is_goe():
    cfg = rmt.GOEConfig(30)
    sp = rmt.SpectralParams.from_epsilon(0.7, cfg)
    pred = mc.predicted_ratio(cfg, sp, 2).real
    assert pred == pytest.approx(math.exp(mc.log_ratio_constant(cfg, 0.0, 2)) * fn_goe(2, 0.7).value)
