#!/usr/bin/env python3
"""Timing comparison for the enumeration kernels.

Runs each hot kernel through both backends (compiled and plain numpy),
checks that they agree, and prints a small table.  The compiled backend
is skipped automatically when numba is unavailable or disabled through
CHANDISC_DISABLE_NUMBA.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from chandisc import _kernels

HIST_CASES = [(2, 10), (4, 5), (3, 8), (2, 12)]
WEIGHT_CASES = [(6, 10), (5, 20), (2, 300)]


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_histograms(repeat: int) -> None:
    print("block weight histogram (2^(u*m) bit strings)")
    print(f"{'m':>3} {'u':>3} {'strings':>12} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for m, u in HIST_CASES:
        ref = _kernels.histogram_numpy(m, u)
        t_np = _time(_kernels.histogram_numpy, m, u, repeat=repeat)
        if _kernels.USE_NUMBA:
            got = _kernels.histogram_numba(m, u)
            if not np.array_equal(ref, got):
                raise AssertionError(f"backend mismatch at m={m} u={u}")
            t_nb = _time(_kernels.histogram_numba, m, u, repeat=repeat)
            ratio = f"{t_np / t_nb:7.1f}x"
            nb_txt = f"{t_nb:9.3f}s"
        else:
            nb_txt, ratio = "     --", "     --"
        print(f"{m:>3} {u:>3} {2 ** (u * m):>12} {t_np:9.3f}s {nb_txt:>10} {ratio:>8}")


def bench_weights(repeat: int) -> None:
    rng = np.random.default_rng(7)
    print()
    print("weight vector sums ((u+1)^m vectors)")
    print(f"{'m':>3} {'u':>4} {'vectors':>12} {'numpy':>10} {'numba':>10} {'speedup':>8} {'maxdiff':>9}")
    for m, u in WEIGHT_CASES:
        binom = rng.uniform(0.5, 2.0, size=u + 1)
        tq = rng.uniform(0.05, 0.95, size=u + 1)
        bq = rng.uniform(0.05, 0.95, size=(m - 1) * u + 1)
        if u <= 50:
            args = (m, u, True, binom, tq, bq)
            fn_np, fn_nb = _kernels.weights_sum_numpy, _kernels.weights_sum_numba
        else:
            # large u runs through the log-space variant
            args = (m, u, True, np.log(binom), np.log(tq), np.log(bq))
            fn_np, fn_nb = _kernels.weights_sum_log_numpy, _kernels.weights_sum_log_numba
        ref = fn_np(*args)
        t_np = _time(fn_np, *args, repeat=repeat)
        if _kernels.USE_NUMBA:
            got = fn_nb(*args)
            diff = abs(ref - got)
            if diff > 1e-10 * max(1.0, abs(ref)):
                raise AssertionError(f"backend mismatch at m={m} u={u}: {diff}")
            t_nb = _time(fn_nb, *args, repeat=repeat)
            ratio = f"{t_np / t_nb:7.1f}x"
            nb_txt = f"{t_nb:9.3f}s"
            diff_txt = f"{diff:9.1e}"
        else:
            nb_txt, ratio, diff_txt = "     --", "     --", "     --"
        print(f"{m:>3} {u:>4} {(u + 1) ** m:>12} {t_np:9.3f}s {nb_txt:>10} {ratio:>8} {diff_txt:>9}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions, best of N")
    args = parser.parse_args()
    print(f"active backend: {_kernels.active_backend()}")
    if _kernels.USE_NUMBA:
        # trigger jit compilation outside the timed region
        _kernels.histogram_numba(2, 2)
        _kernels.weights_sum_numba(
            2, 2, True, np.ones(3), np.full(3, 0.5), np.full(3, 0.5)
        )
        _kernels.weights_sum_log_numba(
            2, 2, True, np.zeros(3), np.full(3, -0.7), np.full(3, -0.7)
        )
    bench_histograms(args.repeat)
    bench_weights(args.repeat)


if __name__ == "__main__":
    main()
