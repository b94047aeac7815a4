"""Closed-form error probabilities from per-use outcome counting.

For erasure and depolarizing channels the optimal multi-copy discrimination
collapses to a classical problem: each probe either reveals a damage event
(erasure flag, depolarized symbol) or passes intact, so ``u`` probes of a
channel produce a Bernoulli count and the optimal receiver is a maximum
likelihood test on counts.  This module implements the binary version
(``f_u``), the multi-cell position-finding version (``h_mu_*``), and the
channel-specific wrappers that map channel parameters onto effective
Bernoulli probabilities.

The position-finding value ``h`` is computed by three independent routes
with different cost envelopes, kept separate on purpose so they can
cross-validate each other:

* ``h_mu_enumerate``: exact enumeration of all ``2**(u*m)`` outcome strings,
  collapsed through a cached weight-profile histogram,
* ``h_mu_weights``: exact summation over all ``(u+1)**m`` per-cell weight
  vectors with multinomial multiplicities,
* ``h_m1_closed``: closed form for the single-use case.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np

from . import _kernels
from .discrimination import KIND_EXACT, BoundReport

ENUMERATE_MAX_BITS = 24
WEIGHTS_MAX_VECTORS = 10**7
# Above this many uses the multinomial weights are evaluated in log space.
DIRECT_PRODUCT_MAX_U = 50


class OrcError(ValueError):
    """Raised for invalid parameters or when an enumeration guard trips."""


def _check_prob(q, name) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise OrcError(f"{name} must lie in [0, 1], got {q}")
    return q


@dataclasses.dataclass(frozen=True)
class OrcParams:
    """Effective Bernoulli parameters of a position-finding instance.

    ``q_b`` is the per-use damage probability in each of the ``m - 1``
    background cells, ``q_t`` the one in the target cell, and ``u`` the
    number of uses per cell.
    """

    q_b: float
    q_t: float
    u: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "q_b", _check_prob(self.q_b, "q_b"))
        object.__setattr__(self, "q_t", _check_prob(self.q_t, "q_t"))
        object.__setattr__(self, "u", int(self.u))
        object.__setattr__(self, "m", int(self.m))
        if self.u < 1:
            raise OrcError(f"need u >= 1, got {self.u}")
        if self.m < 2:
            raise OrcError(f"need m >= 2 cells, got {self.m}")


@dataclasses.dataclass(frozen=True)
class WeightProfile:
    """Summary (min, max, total) of one per-cell Hamming weight vector."""

    w_min: int
    w_max: int
    total: int
    u: int
    m: int

    def __post_init__(self):
        if not 0 <= self.w_min <= self.w_max <= self.u:
            raise OrcError(f"weights must satisfy 0 <= {self.w_min} <= {self.w_max} <= {self.u}")
        lo = self.w_max + (self.m - 1) * self.w_min
        hi = self.w_min + (self.m - 1) * self.w_max
        if not lo <= self.total <= hi:
            raise OrcError(
                f"total {self.total} is not realizable by {self.m} cells with "
                f"extremes ({self.w_min}, {self.w_max})")


def _binom_pmf(q: float, u: int) -> np.ndarray:
    # Probability of k damage events in u uses, k = 0..u.
    k = np.arange(u + 1)
    if u <= DIRECT_PRODUCT_MAX_U:
        coeff = np.array([math.comb(u, int(kk)) for kk in k], dtype=np.float64)
        return coeff * _power_table(q, u) * _power_table(1.0 - q, u)[::-1]
    log_coeff = math.lgamma(u + 1) - np.array(
        [math.lgamma(kk + 1) + math.lgamma(u - kk + 1) for kk in k])
    return np.exp(log_coeff + _log_power_table(q, u) + _log_power_table(1.0 - q, u)[::-1])


def _power_table(q: float, top: int) -> np.ndarray:
    # [q**0, q**1, .., q**top] with the 0**0 = 1 convention.
    out = np.empty(top + 1)
    out[0] = 1.0
    for k in range(1, top + 1):
        out[k] = out[k - 1] * q
    return out


def _log_power_table(q: float, top: int) -> np.ndarray:
    out = np.full(top + 1, -np.inf)
    out[0] = 0.0
    if q > 0.0:
        out[1:] = np.arange(1, top + 1) * math.log(q)
    return out


def f_u(q0, q1, u: int) -> float:
    """Binary minimum error from counting damage events over ``u`` uses.

        f_u = 1/2 - 1/4 * sum_k |P(k | q0) - P(k | q1)|

    with binomial outcome distributions ``P(. | q)``.  Symmetric under
    ``(q0, q1) -> (1 - q0, 1 - q1)`` and non-increasing in ``u``.
    """
    q0 = _check_prob(q0, "q0")
    q1 = _check_prob(q1, "q1")
    u = int(u)
    if u < 1:
        raise OrcError(f"need u >= 1, got {u}")
    deviation = np.abs(_binom_pmf(q0, u) - _binom_pmf(q1, u)).sum()
    return float(0.5 - 0.25 * deviation)


def qec_binary(q0, q1, u: int) -> BoundReport:
    """Ultimate error probability for two erasure channels.

    Counting erasure flags is optimal even against adaptive, entangled
    strategies, and classical probes already achieve it, so one number
    covers every protocol class.
    """
    value = f_u(q0, q1, u)
    return BoundReport(value, KIND_EXACT, "qec_binary", {"q0": q0, "q1": q1, "u": u})


def qdc_binary(q0, q1, d: int, u: int):
    """Ultimate error probabilities for two depolarizing channels.

    Returns ``(entangled, classical)`` reports.  A maximally entangled probe
    detects a depolarizing event with probability ``(1 - 1/d**2) q``; an
    optimal unentangled probe only reaches ``(1 - 1/d) q``.  Both reduce to
    ``f_u`` at the effective detection probabilities.
    """
    d = int(d)
    if d < 2:
        raise OrcError(f"need d >= 2, got {d}")
    ent_scale = 1.0 - 1.0 / d**2
    cls_scale = 1.0 - 1.0 / d
    entangled = BoundReport(
        f_u(ent_scale * q0, ent_scale * q1, u), KIND_EXACT, "qdc_binary_entangled",
        {"q0": q0, "q1": q1, "d": d, "u": u})
    classical = BoundReport(
        f_u(cls_scale * q0, cls_scale * q1, u), KIND_EXACT, "qdc_binary_classical",
        {"q0": q0, "q1": q1, "d": d, "u": u})
    return entangled, classical


@functools.lru_cache(maxsize=None)
def _profile_counts(m: int, u: int) -> np.ndarray:
    counts = _kernels.block_weight_histogram(m, u)
    counts.setflags(write=False)
    return counts


def weight_profiles(m: int, u: int):
    """All realizable weight profiles with their string multiplicities.

    Returns a list of ``(WeightProfile, count)`` pairs; the counts sum to
    ``2**(u*m)``.
    """
    m = int(m)
    u = int(u)
    if u * m > ENUMERATE_MAX_BITS:
        raise OrcError(f"u*m = {u * m} exceeds the enumeration guard {ENUMERATE_MAX_BITS}")
    counts = _profile_counts(m, u)
    out = []
    for w_min, w_max, total in zip(*counts.nonzero()):
        profile = WeightProfile(int(w_min), int(w_max), int(total), u=u, m=m)
        out.append((profile, int(counts[w_min, w_max, total])))
    return out


def _likelihood_tables(params: OrcParams):
    # tq[w]: target-cell likelihood of weight w; bq[j]: combined background
    # likelihood of j damage events across the other m - 1 cells.
    u, m = params.u, params.m
    tq = _power_table(params.q_t, u) * _power_table(1.0 - params.q_t, u)[::-1]
    top = (m - 1) * u
    bq = _power_table(params.q_b, top) * _power_table(1.0 - params.q_b, top)[::-1]
    return tq, bq


def h_mu_enumerate(params: OrcParams) -> float:
    """Position-finding error by exact enumeration of outcome strings.

    The maximum-likelihood receiver picks the cell with the largest (if
    ``q_t >= q_b``) or smallest damage count; ties resolve to the
    largest-count rule, which matches the tie convention of the other
    routes.  The enumeration is collapsed through the cached profile
    histogram, so repeated evaluations at new probabilities cost only the
    profile sum.
    """
    if params.u * params.m > ENUMERATE_MAX_BITS:
        raise OrcError(
            f"u*m = {params.u * params.m} exceeds the enumeration guard "
            f"{ENUMERATE_MAX_BITS}; use h_mu_weights")
    counts = _profile_counts(params.m, params.u)
    w_min, w_max, total = counts.nonzero()
    mult = counts[w_min, w_max, total].astype(np.float64)
    w_star = w_max if params.q_t >= params.q_b else w_min
    tq, bq = _likelihood_tables(params)
    best = float(np.sum(mult * tq[w_star] * bq[total - w_star]))
    return 1.0 - best / params.m


def h_mu_weights(params: OrcParams) -> float:
    """Position-finding error by summation over per-cell weight vectors.

    Algebraically identical to :func:`h_mu_enumerate` but organized as a sum
    over the ``(u+1)**m`` weight vectors with multinomial multiplicities,
    which trades the ``2**(u*m)`` string count for a polynomial one and so
    reaches much larger ``u``.  Beyond ``DIRECT_PRODUCT_MAX_U`` uses the
    multiplicities are folded in log space to dodge overflow.
    """
    u, m = params.u, params.m
    if (u + 1) ** m > WEIGHTS_MAX_VECTORS:
        raise OrcError(
            f"(u+1)**m = {(u + 1) ** m} exceeds the weight-vector guard "
            f"{WEIGHTS_MAX_VECTORS}")
    use_max = params.q_t >= params.q_b
    if u <= DIRECT_PRODUCT_MAX_U:
        binom = np.array([math.comb(u, k) for k in range(u + 1)], dtype=np.float64)
        tq, bq = _likelihood_tables(params)
        best = _kernels.weights_sum(m, u, use_max, binom, tq, bq)
    else:
        lbinom = np.array([math.lgamma(u + 1) - math.lgamma(k + 1) - math.lgamma(u - k + 1)
                           for k in range(u + 1)])
        ltq = _log_power_table(params.q_t, u) + _log_power_table(1.0 - params.q_t, u)[::-1]
        top = (m - 1) * u
        lbq = _log_power_table(params.q_b, top) + _log_power_table(1.0 - params.q_b, top)[::-1]
        best = _kernels.weights_sum_log(m, u, use_max, lbinom, ltq, lbq)
    return 1.0 - best / m


def h_m1_closed(params: OrcParams) -> float:
    """Single-use position-finding error in closed form.

    Only defined for ``u == 1``.  The expression groups outcome strings by
    total weight; the all-same-outcome strings contribute their own terms
    and the mixed strings carry the larger of the two likelihood ratios,
    which reduces to comparing ``q_t`` with ``q_b``.  The grouped factor
    ``(1 - (1-q_b)**m - q_b**m) / q_b`` is expanded through the geometric
    identity ``(1 - (1-q)**m) / q = sum_j (1-q)**j`` so that nothing is
    divided by a vanishing parameter; the naive quotient loses every digit
    once ``q_b`` drops below the rounding scale.
    """
    if params.u != 1:
        raise OrcError(f"closed form requires u = 1, got u = {params.u}")
    m, q_b, q_t = params.m, params.q_b, params.q_t
    if q_t >= q_b:
        bracket = sum((1.0 - q_b) ** j for j in range(m)) - q_b ** (m - 1)
        mid = q_t * bracket
    else:
        bracket = sum(q_b**j for j in range(m)) - (1.0 - q_b) ** (m - 1)
        mid = (1.0 - q_t) * bracket
    best = q_t * q_b ** (m - 1) + (1.0 - q_t) * (1.0 - q_b) ** (m - 1) + mid
    return 1.0 - best / m


def h_mu(params: OrcParams) -> float:
    """Position-finding error via the cheapest applicable exact route."""
    if params.u == 1:
        return h_m1_closed(params)
    if params.u * params.m <= ENUMERATE_MAX_BITS:
        return h_mu_enumerate(params)
    if (params.u + 1) ** params.m <= WEIGHTS_MAX_VECTORS:
        return h_mu_weights(params)
    raise OrcError(
        f"no exact route for m={params.m}, u={params.u}: both the string and "
        f"the weight-vector enumerations exceed their guards")


def qec_cpf(q_b, q_t, m: int, u: int) -> BoundReport:
    """Ultimate error for finding one erasure channel among ``m`` positions.

    Erasure flags are classical evidence, so the adaptive, entangled optimum
    equals the counting receiver's error at the raw probabilities.
    """
    params = OrcParams(q_b=q_b, q_t=q_t, u=u, m=m)
    return BoundReport(h_mu(params), KIND_EXACT, "qec_cpf",
                       {"q_b": q_b, "q_t": q_t, "m": m, "u": u})


def qdc_cpf(q_b, q_t, m: int, u: int, d: int):
    """Ultimate errors for finding one depolarizing channel among ``m``.

    Returns ``(entangled, classical)`` reports, obtained by rescaling both
    cell probabilities to the effective detection probabilities
    ``(1 - 1/d**2) q`` and ``(1 - 1/d) q`` respectively.
    """
    d = int(d)
    if d < 2:
        raise OrcError(f"need d >= 2, got {d}")
    ent_scale = 1.0 - 1.0 / d**2
    cls_scale = 1.0 - 1.0 / d
    ent_params = OrcParams(q_b=ent_scale * q_b, q_t=ent_scale * q_t, u=u, m=m)
    cls_params = OrcParams(q_b=cls_scale * q_b, q_t=cls_scale * q_t, u=u, m=m)
    meta = {"q_b": q_b, "q_t": q_t, "m": m, "u": u, "d": d}
    entangled = BoundReport(h_mu(ent_params), KIND_EXACT, "qdc_cpf_entangled", meta)
    classical = BoundReport(h_mu(cls_params), KIND_EXACT, "qdc_cpf_classical", meta)
    return entangled, classical
