"""Enumeration kernels behind the multi-cell classical error formulas.

Two combinatorial sums dominate the runtime of the position-finding
analytics: a histogram of per-cell Hamming-weight profiles over all
``2**(u*m)`` outcome strings, and a direct sum over all ``(u+1)**m``
per-cell weight vectors.  Both are plain loops, so they carry numba-jitted
implementations with pure-numpy fallbacks.

Backend selection happens at import time: numba is used when importable
unless the environment variable ``CHANDISC_DISABLE_NUMBA`` is set to a
truthy value (``1``, ``true``, ``yes``, ``on``).  ``active_backend()``
reports the choice.  The two implementations of each kernel are exported
individually so the benchmark suite and the tests can compare them.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

_CHUNK = 1 << 20

_POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


def _env_disabled() -> bool:
    return os.environ.get("CHANDISC_DISABLE_NUMBA", "").strip().lower() in {
        "1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def active_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# -- weight-profile histogram ------------------------------------------------
#
# For every bit string of m blocks of u bits, classify it by the profile
# (min block weight, max block weight, total weight) and count multiplicities.
# The histogram has shape (u+1, u+1, u*m+1) and sums to 2**(u*m).

def _histogram_loop(m, u, lut):
    size = 1 << (u * m)
    mask = (1 << u) - 1
    counts = np.zeros((u + 1, u + 1, u * m + 1), dtype=np.int64)
    for x in range(size):
        wmin = u
        wmax = 0
        total = 0
        for l in range(m):
            v = (x >> (l * u)) & mask
            w = lut[v & 0xFFFF] + lut[v >> 16]
            if w < wmin:
                wmin = w
            if w > wmax:
                wmax = w
            total += w
        counts[wmin, wmax, total] += 1
    return counts


def histogram_numpy(m: int, u: int) -> np.ndarray:
    size = 1 << (u * m)
    mask = np.uint64((1 << u) - 1)
    side = (u + 1) * (u + 1) * (u * m + 1)
    flat = np.zeros(side, dtype=np.int64)
    for start in range(0, size, _CHUNK):
        xs = np.arange(start, min(start + _CHUNK, size), dtype=np.uint64)
        weights = np.empty((xs.size, m), dtype=np.int64)
        for l in range(m):
            block = (xs >> np.uint64(l * u)) & mask
            weights[:, l] = np.bitwise_count(block).astype(np.int64)
        wmin = weights.min(axis=1)
        wmax = weights.max(axis=1)
        total = weights.sum(axis=1)
        key = (wmin * (u + 1) + wmax) * (u * m + 1) + total
        flat += np.bincount(key, minlength=side)
    return flat.reshape(u + 1, u + 1, u * m + 1)


# -- weight-vector accumulation ----------------------------------------------
#
# Sum, over all vectors (w_1 .. w_m) with entries in 0..u, of
#   prod_l binom[w_l] * tq[w*] * bq[W - w*]
# where W is the total weight and w* is the max (or min) entry.  The tables
# encode binomial coefficients and the two outcome likelihoods; Kahan
# summation keeps the many-term accumulation well below the agreement
# tolerance with the histogram route.

def _weights_loop(m, u, use_max, binom, tq, bq):
    w = np.zeros(m, dtype=np.int64)
    n = (u + 1) ** m
    total = 0.0
    comp = 0.0
    for _ in range(n):
        wmin = u
        wmax = 0
        wsum = 0
        mult = 1.0
        for l in range(m):
            wl = w[l]
            if wl < wmin:
                wmin = wl
            if wl > wmax:
                wmax = wl
            wsum += wl
            mult *= binom[wl]
        wstar = wmax if use_max else wmin
        term = mult * tq[wstar] * bq[wsum - wstar]
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        l = 0
        while l < m:
            w[l] += 1
            if w[l] <= u:
                break
            w[l] = 0
            l += 1
    return total


def _weights_loop_log(m, u, use_max, lbinom, ltq, lbq):
    w = np.zeros(m, dtype=np.int64)
    n = (u + 1) ** m
    total = 0.0
    comp = 0.0
    for _ in range(n):
        wmin = u
        wmax = 0
        wsum = 0
        lmult = 0.0
        for l in range(m):
            wl = w[l]
            if wl < wmin:
                wmin = wl
            if wl > wmax:
                wmax = wl
            wsum += wl
            lmult += lbinom[wl]
        wstar = wmax if use_max else wmin
        term = np.exp(lmult + ltq[wstar] + lbq[wsum - wstar])
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        l = 0
        while l < m:
            w[l] += 1
            if w[l] <= u:
                break
            w[l] = 0
            l += 1
    return total


def _weights_chunks(m: int, u: int):
    n = (u + 1) ** m
    for start in range(0, n, _CHUNK):
        rem = np.arange(start, min(start + _CHUNK, n), dtype=np.int64)
        weights = np.empty((rem.size, m), dtype=np.int64)
        for l in range(m):
            rem, weights[:, l] = np.divmod(rem, u + 1)
        yield weights


def weights_sum_numpy(m: int, u: int, use_max: bool, binom, tq, bq) -> float:
    partials = []
    for weights in _weights_chunks(m, u):
        wsum = weights.sum(axis=1)
        wstar = weights.max(axis=1) if use_max else weights.min(axis=1)
        mult = binom[weights].prod(axis=1)
        partials.append(float((mult * tq[wstar] * bq[wsum - wstar]).sum()))
    return math.fsum(partials)


def weights_sum_log_numpy(m: int, u: int, use_max: bool, lbinom, ltq, lbq) -> float:
    partials = []
    for weights in _weights_chunks(m, u):
        wsum = weights.sum(axis=1)
        wstar = weights.max(axis=1) if use_max else weights.min(axis=1)
        lmult = lbinom[weights].sum(axis=1)
        partials.append(float(np.exp(lmult + ltq[wstar] + lbq[wsum - wstar]).sum()))
    return math.fsum(partials)


if HAVE_NUMBA:
    _histogram_loop_nb = numba.njit(cache=True)(_histogram_loop)
    _weights_loop_nb = numba.njit(cache=True)(_weights_loop)
    _weights_loop_log_nb = numba.njit(cache=True)(_weights_loop_log)

    def histogram_numba(m: int, u: int) -> np.ndarray:
        return _histogram_loop_nb(m, u, _POPCOUNT16)

    def weights_sum_numba(m, u, use_max, binom, tq, bq) -> float:
        return float(_weights_loop_nb(m, u, use_max, binom, tq, bq))

    def weights_sum_log_numba(m, u, use_max, lbinom, ltq, lbq) -> float:
        return float(_weights_loop_log_nb(m, u, use_max, lbinom, ltq, lbq))


def block_weight_histogram(m: int, u: int) -> np.ndarray:
    """Counts of (min, max, total) block-weight profiles over all bit strings."""
    if USE_NUMBA:
        return histogram_numba(m, u)
    return histogram_numpy(m, u)


def weights_sum(m: int, u: int, use_max: bool, binom, tq, bq) -> float:
    """Likelihood-weighted sum over all per-cell weight vectors."""
    if USE_NUMBA:
        return weights_sum_numba(m, u, bool(use_max), binom, tq, bq)
    return weights_sum_numpy(m, u, bool(use_max), binom, tq, bq)


def weights_sum_log(m: int, u: int, use_max: bool, lbinom, ltq, lbq) -> float:
    """Log-table variant of :func:`weights_sum` for large per-cell counts."""
    if USE_NUMBA:
        return weights_sum_log_numba(m, u, bool(use_max), lbinom, ltq, lbq)
    return weights_sum_log_numpy(m, u, bool(use_max), lbinom, ltq, lbq)
