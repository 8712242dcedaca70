"""``charpoly`` command line: evaluations, Monte Carlo runs, scans and validation.

Exit status: 0 success, 1 computation failure (point commands, a failed
criterion, or a grid with no successful row), 2 invalid configuration,
3 output I/O failure.
"""
import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import acceptance, asymptotics, fneval, montecarlo, rmt
from .errors import CharpolyError
from .records import FnCache, ResultRecord, write_results

log = logging.getLogger("charpoly")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULTS = {
    "ensemble": "goe", "n": 1, "N": 100, "J": 1.0, "mu": 0.0, "omega": 0.0,
    "delta": None, "eps": None, "eps_grid": None, "method": "auto", "tol": 1e-9,
    "samples": 10_000, "seed": 0, "stream": 0, "X": 1.0, "p": 2, "k": 2.0,
    "out": None, "format": None, "cache": None, "sampler": "dense", "criteria": None,
}
COMMANDS = ("fn-eval", "mc-ratio", "mc-k1", "asymp-scan", "cluster-scan", "validate")


class ConfigError(Exception):
    pass


def _flags(p):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file of parameters (flags override)")
    p.add_argument("--ensemble", choices=("goe", "gue"), default=S)
    p.add_argument("--n", type=int, default=S, help="moment order")
    p.add_argument("--N", type=int, default=S, help="matrix dimension")
    p.add_argument("--J", type=float, default=S)
    p.add_argument("--mu", type=float, default=S)
    p.add_argument("--omega", type=float, default=S)
    p.add_argument("--delta", type=float, default=S)
    p.add_argument("--eps", type=float, default=S)
    p.add_argument("--eps-grid", dest="eps_grid", default=S, help="start:stop:count:logspace")
    p.add_argument("--method", default=S)
    p.add_argument("--tol", type=float, default=S)
    p.add_argument("--samples", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--stream", type=int, default=S)
    p.add_argument("--sampler", choices=("dense", "tridiagonal"), default=S)
    p.add_argument("--X", type=float, default=S)
    p.add_argument("--p", type=int, default=S)
    p.add_argument("--k", type=float, default=S)
    p.add_argument("--out", default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--cache", default=S)
    p.add_argument("--criteria", default=S, help="comma-separated criterion numbers (validate)")


def build_parser():
    parser = argparse.ArgumentParser(prog="charpoly", allow_abbrev=False,
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _flags(sub.add_parser(name, allow_abbrev=False))
    return parser


def parse_eps_grid(text):
    """'start:stop:count:logspace' (the last field may also be 'linspace')."""
    try:
        start, stop, count, kind = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise ConfigError(f"bad --eps-grid {text!r}: {exc}") from None
    if count < 1 or not (start > 0 and stop > 0):
        raise ConfigError("eps grid needs count >= 1 and positive endpoints")
    if kind == "logspace":
        return list(np.logspace(math.log10(start), math.log10(stop), count))
    if kind == "linspace":
        return list(np.linspace(start, stop, count))
    raise ConfigError(f"unknown grid kind {kind!r}")


def resolve_params(ns):
    given = {k: v for k, v in vars(ns).items() if k != "command"}
    params = dict(DEFAULTS)
    if "config" in given:
        try:
            with open(given.pop("config"), encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            params[key] = value
    params.update(given)
    return params


# -- per-command validation ---------------------------------------------------

def _goe_setup(params, min_dim):
    try:
        cfg = rmt.GOEConfig(int(params["N"]), float(params["J"]), int(params["seed"]),
                            int(params["stream"]))
        mu = float(params["mu"])
        rmt.mean_density(mu, cfg.coupling)
        if params["delta"] is not None:
            sp = rmt.SpectralParams(mu, float(params["omega"]), float(params["delta"]))
        elif params["eps"] is not None:
            sp = rmt.SpectralParams.from_epsilon(float(params["eps"]), cfg, mu,
                                                 float(params["omega"]))
        else:
            raise ConfigError("give --delta or --eps")
        if not sp.reg > 0:
            raise ConfigError("delta must be positive")
        rmt.require_moment_dim(cfg, min_dim)
    except CharpolyError as exc:
        raise ConfigError(str(exc)) from None
    if int(params["samples"]) < montecarlo.MIN_SAMPLES:
        raise ConfigError(f"--samples must be >= {montecarlo.MIN_SAMPLES}")
    return cfg, sp


def _check_n(params, lo=1):
    n = params["n"]
    if int(n) != n or n < lo:
        raise ConfigError(f"--n must be an integer >= {lo}")
    return int(n)


# -- commands -----------------------------------------------------------------

def _open_cache(params):
    path = params["cache"] or os.environ.get("CHARPOLY_CACHE")
    return FnCache(path) if path else None


def _fn_eval_one(params, eps, cache):
    n = int(params["n"])
    ens, method, tol = params["ensemble"], params["method"], float(params["tol"])
    key_method = f"{ens}:{method}"
    hit = cache.lookup(n, eps, key_method, tol) if cache else None
    if hit is not None:
        return hit
    if ens == "gue":
        mode = "closed-form" if method == "auto" else method
        res = fneval.fn_gue(n, eps, mode=mode, tol=tol)
    elif method == "truncated":
        res = fneval.fn_goe_truncated(n, eps, tol=tol)
    else:
        res = fneval.fn_goe(n, eps, method=method, tol=tol)
    if cache:
        cache.store(n, eps, key_method, tol, res)
    return res


def _timed(func, *args):
    t0 = time.perf_counter()
    out = func(*args)
    return out, 1e3 * (time.perf_counter() - t0)


def _error_record(command, exc, **kw):
    log.error("%s failed: %s: %s", command, type(exc).__name__, exc)
    return ResultRecord(command, method=f"error:{type(exc).__name__}", **kw)


def cmd_fn_eval(params):
    n = _check_n(params)
    if params["eps"] is None:
        raise ConfigError("fn-eval needs --eps")
    eps = float(params["eps"])
    if not eps > 0:
        raise ConfigError("--eps must be positive")
    cache = _open_cache(params)
    try:
        res, ms = _timed(_fn_eval_one, params, eps, cache)
    except CharpolyError as exc:
        return [_error_record("fn-eval", exc, n=n, eps=eps)], 1
    return [ResultRecord("fn-eval", n=n, eps=eps, method=f"{params['ensemble']}:{res.method.value}",
                         value_re=float(res.value), abs_error=float(res.abs_error),
                         wall_ms=ms)], 0


def _mc_record(command, params, cfg, sp, method, value, err, ms):
    return ResultRecord(command, n=int(params["n"]), N=cfg.dim, J=cfg.coupling, mu=sp.center,
                        omega=sp.offset, delta=sp.reg, eps=rmt.epsilon_from_params(cfg, sp).real,
                        method=method, value_re=value.real, value_im=value.imag,
                        abs_error=err, samples=int(params["samples"]), seed=cfg.seed,
                        stream=cfg.stream, wall_ms=ms)


def cmd_mc_ratio(params):
    n = _check_n(params)
    cfg, sp = _goe_setup(params, 2 * n + 1)
    sampler = params["sampler"]
    try:
        est, ms = _timed(montecarlo.estimate_ratio_Kn, cfg, sp, n, int(params["samples"]), sampler)
        recs = [_mc_record("mc-ratio", params, cfg, sp, f"mc-{sampler}", est.mean, est.stderr, ms)]
        if sp.offset == 0.0:
            pred, ms = _timed(montecarlo.predicted_ratio, cfg, sp, n)
            recs.append(_mc_record("mc-ratio", params, cfg, sp, "theory", pred, 0.0, ms))
    except CharpolyError as exc:
        return [_error_record("mc-ratio", exc, n=n, N=cfg.dim)], 1
    return recs, 0


def cmd_mc_k1(params):
    n = _check_n(params)
    cfg, sp = _goe_setup(params, n + 1)
    sampler = params["sampler"]
    try:
        est, ms = _timed(montecarlo.estimate_K1, cfg, sp, n, int(params["samples"]), sampler)
        rel = est.stderr / abs(est.mean)
        recs = [_mc_record("mc-k1", params, cfg, sp, f"mc-{sampler}:log", est.log_mean, rel, ms)]
        sad, ms = _timed(montecarlo.saddle_point_K1, cfg, sp, n)
        recs.append(_mc_record("mc-k1", params, cfg, sp, "saddle:log", sad.log_value, 0.0, ms))
    except CharpolyError as exc:
        return [_error_record("mc-k1", exc, n=n, N=cfg.dim)], 1
    return recs, 0


def _grid(params):
    if params["eps_grid"] is None:
        raise ConfigError("this command needs --eps-grid start:stop:count:logspace")
    return parse_eps_grid(params["eps_grid"])


def cmd_asymp_scan(params):
    n = _check_n(params)
    grid = _grid(params)
    cache = _open_cache(params)
    recs, errors = [], 0
    for eps in grid:
        try:
            res, ms = _timed(_fn_eval_one, params, eps, cache)
            recs.append(ResultRecord("asymp-scan", n=n, eps=eps,
                                     method=f"{params['ensemble']}:{res.method.value}",
                                     value_re=res.value, abs_error=res.abs_error, wall_ms=ms))
        except CharpolyError as exc:
            errors += 1
            recs.append(_error_record("asymp-scan", exc, n=n, eps=eps))
            continue
        if params["ensemble"] == "goe":
            for law in (asymptotics.small_eps_law(n), asymptotics.large_eps_law(n)):
                if law.regime is asymptotics.Regime.SMALL_EPS and eps >= 1.0:
                    continue
                recs.append(ResultRecord("asymp-scan", n=n, eps=eps, method=law.regime.value,
                                         value_re=law.value(eps), abs_error=0.0))
    if cache:
        log.info("cache hits %d, misses %d", cache.hits, cache.misses)
    return recs, errors


def cmd_cluster_scan(params):
    p, k, x = int(params["p"]), float(params["k"]), float(params["X"])
    grid = _grid(params)
    recs, errors = [], 0
    for eps in grid:
        try:
            res, ms = _timed(fneval.cluster_integral, p, k, x, eps, float(params["tol"]),
                             int(params["samples"]) if p > 2 else 1_000_000, int(params["seed"]))
            recs.append(ResultRecord("cluster-scan", n=p, eps=eps,
                                     method=f"{res.method.value}[k={k:.17g},X={x:.17g}]",
                                     value_re=res.i_value, abs_error=res.abs_error,
                                     seed=int(params["seed"]) if p > 2 else None, wall_ms=ms))
        except CharpolyError as exc:
            errors += 1
            recs.append(_error_record("cluster-scan", exc, n=p, eps=eps))
    return recs, errors


def cmd_validate(params):
    if params["criteria"]:
        try:
            numbers = [int(c) for c in str(params["criteria"]).split(",")]
        except ValueError:
            raise ConfigError("--criteria takes comma-separated integers") from None
        bad = [c for c in numbers if c not in acceptance.CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
    else:
        numbers = None
    results = acceptance.run_all(numbers, echo=lambda line: print(line, file=sys.stderr, flush=True))
    recs = [ResultRecord("validate", n=r.number, method=f"criterion-{r.number}",
                         value_re=float(r.passed), abs_error=0.0, wall_ms=1e3 * r.seconds)
            for r in results]
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed", file=sys.stderr)
    return recs, failed


HANDLERS = {
    "fn-eval": cmd_fn_eval, "mc-ratio": cmd_mc_ratio, "mc-k1": cmd_mc_k1,
    "asymp-scan": cmd_asymp_scan, "cluster-scan": cmd_cluster_scan, "validate": cmd_validate,
}
GRID_COMMANDS = ("asymp-scan", "cluster-scan")


def run(command, params):
    """Execute one command; returns (records, exit_status)."""
    records, errors = HANDLERS[command](params)
    if command in GRID_COMMANDS:
        if errors:
            log.warning("%d of %d grid rows failed", errors, len(records))
        ok_rows = sum(r.ok for r in records)
        return records, EXIT_OK if ok_rows >= 1 else EXIT_FAIL
    return records, EXIT_OK if errors == 0 else EXIT_FAIL


def _emit(records, params, command):
    out = params["out"]
    fmt = params["format"] or ("json" if out and str(out).endswith(".json") else "csv")
    text = write_results(records, out, fmt)
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    meta = {"version": __version__, "command": command,
            "params": {k: v for k, v in params.items() if k not in ("out", "format")}}
    with open(f"{out}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        params = resolve_params(ns)
        records, status = run(ns.command, params)
    except ConfigError as exc:
        parser.error(str(exc))          # exits with status 2
    try:
        _emit(records, params, ns.command)
    except OSError as exc:
        log.error("cannot write results: %s", exc)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
