"""Timing comparison of the compiled and pure-Python kernels.

Run:  python3 benchmarks/bench_kernels.py

Also asserts bitwise equality between the two backends on every measured
problem, since speed without identical bytes would be useless here.
"""
import sys
import time

import numpy as np

from frfband import _kernels_py

try:
    from frfband import _kernels
except ImportError:
    print("compiled kernels are not built; nothing to compare", file=sys.stderr)
    sys.exit(1)


def _problem(rng, n1, n2, t, bs):
    y1 = rng.standard_normal((n1, t))
    y2 = rng.standard_normal((n2, t))
    idx1 = rng.integers(0, n1, size=n1)
    idx2 = rng.integers(0, n2, size=n2)
    cnt1 = rng.multinomial(n1, np.full(n1, 1.0 / n1), size=bs).astype(float)
    cnt2 = rng.multinomial(n2, np.full(n2, 1.0 / n2), size=bs).astype(float)
    xm = y1.mean(axis=0) - y2.mean(axis=0)
    return y1, y2, xm, idx1, idx2, cnt1, cnt2


def _time(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(7)
    cases = [
        ("n=10, T=440, Bs=100", 10, 10, 440, 100),
        ("n=10, T=440, Bs=200", 10, 10, 440, 200),
        ("n=20, T=880, Bs=200", 20, 20, 880, 200),
    ]
    print(f"{'case':24s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, n1, n2, t, bs in cases:
        y1, y2, xm, idx1, idx2, cnt1, cnt2 = _problem(rng, n1, n2, t, bs)

        a = _kernels.pivot_stat(y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12)
        b = _kernels_py.pivot_stat(y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12)
        assert a == b, f"backends disagree on {name}: {a} vs {b}"
        sa = _kernels.diff_sigma(y1, y2, idx1, idx2, cnt1, cnt2)
        sb = _kernels_py.diff_sigma(y1, y2, idx1, idx2, cnt1, cnt2)
        assert np.array_equal(sa, sb), f"diff_sigma bytes differ on {name}"

        t_py = _time(lambda: _kernels_py.pivot_stat(
            y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12), reps=5)
        t_cy = _time(lambda: _kernels.pivot_stat(
            y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12), reps=5)
        print(f"{name:24s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms "
              f"{t_py / t_cy:7.1f}x")
    print("bitwise equality held on every case")


if __name__ == "__main__":
    main()
