"""Acceptance criteria 1-11 as plain functions returning pass/fail plus detail.

Used by ``charpoly validate`` and by the acceptance test module.  Sample
sizes default to the values the criteria prescribe; criterion 7's trend
part takes extra keyword arguments because its budget is a free choice.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from . import fneval as fe
from . import montecarlo as mc
from . import rmt
from .specialfns import bessel_k_scaled


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:>2} {self.title}: {self.detail} ({self.seconds:.1f} s)"


def _rel(a, b):
    return abs(a - b) / abs(b)


def criterion_1():
    worst = 0.0
    for n in (1, 2, 3):
        for eps in (0.5, 1.0, 2.0):
            q = fe.fn_gue(n, eps, mode="quadrature", tol=1e-10).value
            worst = max(worst, _rel(q, fe.fn_gue_closed_form(n, eps)))
    return worst <= 1e-6, f"max rel diff {worst:.2e} (tol 1e-6)"


def criterion_2():
    worst = 0.0
    for eps in (1e-4, 0.01, 1.0, 10.0, 50.0):
        q = fe.fn_goe_quadrature(1, eps, tol=1e-10).value
        worst = max(worst, _rel(q, bessel_k_scaled(0, eps)))
    return worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)"


def criterion_3():
    worst = 0.0
    for n in (2, 3):
        for eps in (0.25, 1.0, 4.0):
            q = fe.fn_goe_quadrature(n, eps, tol=1e-9).value
            p = fe.fn_goe_pfaffian(n, eps).value
            worst = max(worst, _rel(q, p))
    return worst <= 1e-5, f"max rel diff {worst:.2e} (tol 1e-5)"


def criterion_4():
    ratios = {}
    for n in (1, 2, 3):
        law = asy.large_eps_law(n)
        ratios[n] = fe.fn_goe(n, 200.0).value / law.value(200.0)
    ok = all(0.95 <= r <= 1.05 for r in ratios.values()) and 0.999 <= ratios[1] <= 1.001
    return ok, ", ".join(f"n={n}: {r:.5f}" for n, r in ratios.items())


def criterion_5():
    parts = []
    ok = True
    for n in (2, 3):
        d = fe.ftilde_derivative(n, 1e-4)
        target = fe.derivative_limit(n)
        ok &= _rel(d.scaled, target) <= 0.05
        parts.append(f"n={n}: {d.scaled:.4f} vs {target:g}")
    return ok, ", ".join(parts)


def criterion_6():
    eps = np.logspace(-6, -3, 10)
    parts = []
    ok = True
    for n in (1, 2):
        ft = [e ** (0.5 * n * (n - 1)) * fe.fn_goe_quadrature(n, e).value for e in eps]
        a, b = np.polyfit(np.log(1.0 / eps), ft, 1)
        target = asy.small_eps_law(n).constant
        ok &= _rel(a, target) <= 0.05
        parts.append(f"n={n}: a={a:.5f} (target {target:g}), b={b:.4f}")
    return ok, ", ".join(parts)


def criterion_7(dense_samples=20_000, trend_samples=(4_000_000, 16_000_000), seed=2024):
    eps = math.sqrt(2.0)
    cfg = rmt.GOEConfig(200, 1.0, seed)
    sp = rmt.SpectralParams.from_epsilon(eps, cfg)
    est = mc.estimate_ratio_Kn(cfg, sp, 1, dense_samples, sampler="dense")
    pred = mc.predicted_ratio(cfg, sp, 1).real
    z = abs(est.mean.real - pred) / est.stderr
    part_a = z <= 3.0
    devs = {}
    for big_n, samples in zip((50, 200), trend_samples):
        c = rmt.GOEConfig(big_n, 1.0, seed, stream=1)
        s = rmt.SpectralParams.from_epsilon(eps, c)
        r = mc.estimate_ratio_Kn(c, s, 1, samples, sampler="tridiagonal")
        p = mc.predicted_ratio(c, s, 1).real
        devs[big_n] = (abs(r.mean.real / p - 1.0), r.stderr / p)
    part_b = devs[50][0] > devs[200][0]
    gap_sigma = (devs[50][0] - devs[200][0]) / math.hypot(devs[50][1], devs[200][1])
    detail = (f"N=200 dense: {est.mean.real:.4f} +- {est.stderr:.4f} vs C*F1 {pred:.4f} "
              f"({z:.2f} se); |dev| N=50 {devs[50][0]:.4%} +- {devs[50][1]:.4%}, "
              f"N=200 {devs[200][0]:.4%} +- {devs[200][1]:.4%} (gap {gap_sigma:+.2f} sigma)")
    return part_a and part_b, detail


def criterion_8(samples=100_000, seed=11):
    cfg = rmt.GOEConfig(100, 1.0, seed)
    sp = rmt.SpectralParams(0.0, 0.0, 0.01)
    est = mc.estimate_K1(cfg, sp, 1, samples)
    sad = mc.saddle_point_K1(cfg, sp, 1)
    ratio = math.exp(sad.log_value.real - est.log_mean.real)
    return abs(ratio - 1.0) <= 0.10, f"|saddle|/|MC| = {ratio:.4f} (MC rel se {est.stderr / abs(est.mean):.2%})"


def criterion_9():
    vals = {e: fe.cluster_integral(2, 2.0, 1.0, e).i_value for e in (1e-2, 1e-3, 1e-4, 1e-5)}
    diffs = [vals[e / 10] - vals[e] for e in (1e-2, 1e-3, 1e-4)]
    spread = max(diffs) / min(diffs) - 1.0
    lim = fe.cluster_integral(1, 2.0, 1.0, 1e-9).i_value
    ok = spread <= 0.10 and abs(lim - math.pi) <= 1e-6
    return ok, (f"differences {', '.join(f'{d:.4f}' for d in diffs)} (spread {spread:.2%}); "
                f"p=1,k=2 limit - pi = {lim - math.pi:.1e}")


def criterion_10():
    table = {1: 0.0, 1.5: 0.5, 2: 1.0, 2.5: 2.0, 3: 3.0}
    ok = all(asy.nu_exponent(k) == v for k, v in table.items())
    flags = {k: asy.dominant_cluster(k)[1] for k in table}
    ok &= all(flags[k] == (k == int(k)) for k in table)
    return ok, "nu(k) " + ", ".join(f"{k}->{asy.nu_exponent(k):g}" for k in table)


def _semicircle_cdf(x, j=1.0):
    a = j * math.sqrt(2.0)
    return (x * math.sqrt(a * a - x * x) / 2.0 + j * j * math.asin(x / a)) / (math.pi * j * j)


def criterion_11(draws=10_000, seed=5):
    big_n = 50
    cfg = rmt.GOEConfig(big_n, 1.0, seed)
    tr = np.array([np.sum(rmt.sample_goe(cfg, i) ** 2) for i in range(draws)])
    target = (big_n + 1) / 2.0
    z = abs(tr.mean() - target) / (tr.std(ddof=1) / math.sqrt(draws))
    # density: 1e3 draws at N=200, 20 bins on [-1, 1], each within 3 sigma
    cfg2 = rmt.GOEConfig(200, 1.0, seed, stream=1)
    eigs = np.concatenate([rmt.spectrum(rmt.sample_goe(cfg2, i)) for i in range(1000)])
    edges = np.linspace(-1.0, 1.0, 21)
    counts, _ = np.histogram(eigs, edges)
    expected = eigs.size * np.diff([_semicircle_cdf(x) for x in edges])
    worst = float(np.max(np.abs(counts - expected) / np.sqrt(expected)))
    ok = z <= 3.0 and worst <= 3.0
    return ok, f"<Tr H^2> = {tr.mean():.4f} vs {target} ({z:.2f} se); worst density bin {worst:.2f} sigma"


CRITERIA = {
    1: ("GUE closed form vs quadrature", criterion_1),
    2: ("F1 quadrature vs e^eps K0", criterion_2),
    3: ("quadrature vs Pfaffian", criterion_3),
    4: ("large-eps law", criterion_4),
    5: ("derivative identity limit", criterion_5),
    6: ("small-eps log-law constant", criterion_6),
    7: ("end-to-end universality", criterion_7),
    8: ("saddle-point K1", criterion_8),
    9: ("cluster log divergence", criterion_9),
    10: ("exponent table", criterion_10),
    11: ("sampler statistics", criterion_11),
}


def run_criterion(number, **kwargs):
    title, func = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        passed, detail = func(**kwargs)
    except Exception as exc:  # reported as a failure, never swallowed silently
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(numbers=None, echo=None):
    out = []
    for number in numbers or sorted(CRITERIA):
        res = run_criterion(number)
        if echo:
            echo(res.line())
        out.append(res)
    return out
