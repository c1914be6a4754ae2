#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
Set SHIFTLAB_NO_NUMBA=1 to confirm the fallback timings stand alone.
"""

import time

import numpy as np

from shiftlab import _kernels

rng = np.random.default_rng(7)


def timeit(fn, *args, repeats=5):
    fn(*args)  # warm up (JIT compilation on the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_magnitude_sum(n=1_000_000):
    logs = rng.uniform(-200, 200, size=n)
    jit = timeit(_kernels.log2_magnitude_sum, logs)
    py = timeit(_kernels.log2_magnitude_sum_py, logs)
    return "log2_magnitude_sum", f"{n:,} terms", jit, py


def bench_running_average(n=1_000_000):
    terms = rng.uniform(-50, 50, size=n)
    jit = timeit(_kernels.running_log2_average, terms)
    py = timeit(_kernels.running_log2_average_py, terms)
    return "running_log2_average", f"{n:,} steps", jit, py


def bench_window_inf(width=2001, n_max=4000):
    h = rng.uniform(-10, 10, size=width)
    g = rng.uniform(-10, 10, size=width + n_max)
    valid = rng.random(width) > 0.1
    jit = timeit(_kernels.window_inf_curve, g, h, valid, n_max, repeats=3)
    py = timeit(_kernels.window_inf_curve_py, g, h, valid, n_max, repeats=3)
    return "window_inf_curve", f"{width} x {n_max} grid", jit, py


def main():
    print("=" * 72)
    print(f"shiftlab kernel benchmark   (numba active: {_kernels.NUMBA_ENABLED})")
    print("=" * 72)
    rows = [bench_magnitude_sum(), bench_running_average(), bench_window_inf()]
    print(f"{'kernel':<24}{'size':<18}{'accelerated':>12}{'numpy':>10}{'speedup':>8}")
    for name, size, jit, py in rows:
        print(f"{name:<24}{size:<18}{jit * 1e3:>10.1f}ms{py * 1e3:>8.1f}ms{py / jit:>7.1f}x")
    if not _kernels.NUMBA_ENABLED:
        print("\nnumba disabled or unavailable: both columns ran the fallback path")


if __name__ == "__main__":
    main()
