"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_backends.py [--repeat 3]

Both paths are called explicitly through ``use_numba=`` so one process can
time both.  The numba column excludes the first (compiling) call.
"""
import argparse
import time

import numpy as np

from charpoly import _linalg_kernels as lk
from charpoly import _quad_kernels as qk
from charpoly._backend import HAVE_NUMBA


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    diag, off = rng.normal(size=(4096, 200)), rng.normal(size=(4096, 199))
    yield ("tridiag logdet 4096 x N=200",
           lambda nb: lk.tridiag_logdet_batch(diag, off, 0.1 + 0.005j, use_numba=nb))
    yield ("simplex GOE n=2, 8 panels",
           lambda nb: qk.simplex_integral(qk.GOE, 2, 8.0, 8, 12, 0.5, use_numba=nb))
    yield ("simplex GOE n=3, 4 panels",
           lambda nb: qk.simplex_integral(qk.GOE, 3, 6.0, 4, 12, 1.0, use_numba=nb))
    h = rng.normal(size=(100, 100))
    h = (h + h.T) / 2
    yield ("eigvalsh N=100 householder vs LAPACK",
           lambda nb: lk.eigvalsh_householder(h) if nb else lk.eigvalsh_lapack(h))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'kernel':<40}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, func in cases():
        t_np = best_of(lambda: func(False), args.repeat)
        if HAVE_NUMBA:
            func(True)  # compile
            t_nb = best_of(lambda: func(True), args.repeat)
            print(f"{name:<40}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<40}{1e3 * t_np:>12.2f}{'n/a':>12}{'':>10}")


if __name__ == "__main__":
    main()
