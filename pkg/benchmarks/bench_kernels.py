"""Compare the numba and numpy backends of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 100000]

Both forms live in gammadiff._kernels; the numba forms are plain Python when
numba is missing or disabled, in which case the "numba" column times the
interpreted loop.
"""
import argparse
import time

import numpy as np

from gammadiff import _accel, _kernels as K


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(size):
    z1 = np.linspace(-5.0, 20.0, size)
    z2 = np.linspace(-0.9, 0.9, size)
    zl = np.linspace(2.0, 50.0, size)
    nodes, weights = np.polynomial.laguerre.laggauss(40)
    key = K.stream_key(2024, 1)
    return {
        "1F1 series": (lambda: K._hyp_series_loop(0.3, 0.0, 1.7, 0.0, z1, False),
                       lambda: K._hyp_series_numpy(0.3, 0.0, 1.7, 0.0, z1, False)),
        "2F1 series": (lambda: K._hyp_series_loop(0.7, 1.3, 2.1, 0.0, z2, True),
                       lambda: K._hyp_series_numpy(0.7, 1.3, 2.1, 0.0, z2, True)),
        "Laguerre sum": (lambda: K._laguerre_sum_loop(nodes, weights, zl, -0.6),
                         lambda: K._laguerre_sum_numpy(nodes, weights, zl, -0.6)),
        "gamma variates a=0.6": (lambda: K._gamma_variates_loop(key, np.uint64(0), size, 0.6),
                                 lambda: K._gamma_variates_numpy(key, np.uint64(0), size, 0.6)),
        "gamma variates a=5": (lambda: K._gamma_variates_loop(key, np.uint64(0), size, 5.0),
                               lambda: K._gamma_variates_numpy(key, np.uint64(0), size, 5.0)),
        "normal variates": (lambda: K._normal_variates_loop(key, np.uint64(0), size),
                            lambda: K._normal_variates_numpy(key, np.uint64(0), size)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=100_000)
    args = ap.parse_args()

    print(f"numba available: {_accel.HAVE_NUMBA}  (active backend: {_accel.backend()})")
    print(f"{'kernel':24s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, (fast, slow) in cases(args.size).items():
        a, b = fast(), slow()
        a = a[0] if isinstance(a, tuple) else a
        b = b[0] if isinstance(b, tuple) else b
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        tf = best_of(fast, args.repeat)
        ts = best_of(slow, args.repeat)
        print(f"{name:24s} {1e3 * tf:11.2f} {1e3 * ts:11.2f} {ts / tf:8.1f} {diff:13.1e}")


if __name__ == "__main__":
    main()
