"""Minimum-error discrimination of finite state ensembles.

The central quantity is the smallest achievable probability of
misidentifying which state from a known ensemble was prepared.  For two
states this is given in closed form by the trace-norm (Helstrom) formula;
for larger ensembles the module provides the square-root measurement, the
pairwise-fidelity sandwich, a fixed-point iteration for the optimal
measurement with a rigorous optimality certificate, and a closed form for
geometrically uniform pure ensembles.

Every bound is returned as a :class:`BoundReport` carrying the raw value,
its direction (``exact`` / ``lower`` / ``upper``) and the parameters it was
computed from, so downstream tables can state precisely what each number is.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .linalg import DensityMatrix, fidelity, hermitize, trace_norm


class DiscriminationError(ValueError):
    """Raised for invalid ensembles, priors, or solver preconditions."""


KIND_EXACT = "exact"
KIND_LOWER = "lower"
KIND_UPPER = "upper"
_KINDS = (KIND_EXACT, KIND_LOWER, KIND_UPPER)

PRIOR_TOL = 1e-12
POVM_PSD_TOL = 1e-9
POVM_SUM_TOL = 1e-8
_EXACT_SLACK = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class BoundReport:
    """A single error-probability statement.

    ``value`` is reported unclamped.  ``kind`` states the direction:
    ``exact`` values are the quantity itself (and must lie in [0, 1]),
    ``lower``/``upper`` values bound it from the stated side and may fall
    outside [0, 1] when vacuous.  Use :attr:`clamped_value` for plotting.
    """

    value: float
    kind: str
    method: str
    params: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DiscriminationError(f"unknown bound kind {self.kind!r}")
        value = float(self.value)
        if self.kind == KIND_EXACT:
            if not -_EXACT_SLACK <= value <= 1.0 + _EXACT_SLACK:
                raise DiscriminationError(
                    f"exact probability {value} falls outside [0, 1] beyond tolerance")
            value = min(max(value, 0.0), 1.0)
        object.__setattr__(self, "value", value)

    @property
    def clamped_value(self) -> float:
        return min(max(self.value, 0.0), 1.0)

    @property
    def clamped(self) -> bool:
        return self.value != self.clamped_value


class StateEnsemble:
    """States with prior probabilities, all on one Hilbert space."""

    __slots__ = ("states", "priors")

    def __init__(self, states, priors):
        states = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in states)
        if not states:
            raise DiscriminationError("ensemble needs at least one state")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise DiscriminationError("ensemble states live on different dimensions")
        priors = np.asarray(priors, dtype=np.float64)
        if priors.shape != (len(states),):
            raise DiscriminationError(
                f"got {len(states)} states but priors with shape {priors.shape}")
        if priors.min() < 0.0:
            raise DiscriminationError("priors must be nonnegative")
        if abs(priors.sum() - 1.0) > PRIOR_TOL:
            raise DiscriminationError(f"priors sum to {priors.sum()}, not 1")
        priors = priors.copy()
        priors.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def equiprobable(cls, states):
        states = list(states)
        return cls(states, np.full(len(states), 1.0 / len(states)))

    @property
    def m(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __repr__(self):
        return f"StateEnsemble(m={self.m}, dim={self.dim})"


class Povm:
    """A positive operator-valued measure: PSD elements summing to identity."""

    __slots__ = ("elements",)

    def __init__(self, elements, *, validate: bool = True):
        elements = tuple(np.asarray(e, dtype=np.complex128) for e in elements)
        if not elements:
            raise DiscriminationError("measurement needs at least one element")
        dim = elements[0].shape[0]
        if validate:
            total = np.zeros((dim, dim), dtype=np.complex128)
            for e in elements:
                if e.shape != (dim, dim):
                    raise DiscriminationError("measurement elements differ in shape")
                h = (e + e.conj().T) / 2.0
                if np.abs(e - h).max() > 1e-8:
                    raise DiscriminationError("measurement element is not Hermitian")
                if np.linalg.eigvalsh(h).min() < -POVM_PSD_TOL:
                    raise DiscriminationError("measurement element is not positive semidefinite")
                total += e
            if np.abs(total - np.eye(dim)).max() > POVM_SUM_TOL:
                raise DiscriminationError("measurement elements do not sum to identity")
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)


def success_probability(ensemble: StateEnsemble, povm: Povm) -> float:
    """Probability that the measurement identifies the prepared state."""
    if len(povm) != ensemble.m:
        raise DiscriminationError("measurement has wrong number of outcomes")
    total = 0.0
    for p, state, element in zip(ensemble.priors, ensemble.states, povm.elements):
        total += p * np.einsum("ij,ji->", state.mat, element).real
    return float(total)


def helstrom_binary(rho0, rho1, p0: float = 0.5) -> BoundReport:
    """Minimum error probability between two states with priors ``(p0, 1 - p0)``.

    This is ``(1 - ||p0 rho0 - p1 rho1||_1) / 2``, achieved by measuring the
    sign of the weighted difference.
    """
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    rho1 = rho1 if isinstance(rho1, DensityMatrix) else DensityMatrix(rho1)
    if rho0.dim != rho1.dim:
        raise DiscriminationError(f"dimension mismatch: {rho0.dim} vs {rho1.dim}")
    p0 = float(p0)
    if not 0.0 <= p0 <= 1.0:
        raise DiscriminationError(f"prior must lie in [0, 1], got {p0}")
    value = (1.0 - trace_norm(p0 * rho0.mat - (1.0 - p0) * rho1.mat)) / 2.0
    return BoundReport(value, KIND_EXACT, "helstrom_binary",
                       {"p0": p0, "dim": rho0.dim})


def _pinv_sqrt(mat, cut: float = 1e-12):
    # Inverse square root on the support, plus the support projector.
    w, v = np.linalg.eigh(mat)
    keep = w > cut
    v = v[:, keep]
    inv_sqrt = (v / np.sqrt(w[keep])) @ v.conj().T
    return inv_sqrt, v @ v.conj().T


def pgm_povm(ensemble: StateEnsemble) -> Povm:
    """Square-root measurement of an ensemble.

    Elements are ``S p_n rho_n S`` with ``S`` the inverse square root of the
    average state on its support; the deficit off the support is split
    evenly so the elements sum to the identity.
    """
    avg = sum(p * s.mat for p, s in zip(ensemble.priors, ensemble.states))
    inv_sqrt, proj = _pinv_sqrt(hermitize(avg))
    filler = (np.eye(ensemble.dim) - proj) / ensemble.m
    elements = [inv_sqrt @ (p * s.mat) @ inv_sqrt + filler
                for p, s in zip(ensemble.priors, ensemble.states)]
    return Povm(elements)


def pgm_error(ensemble: StateEnsemble) -> BoundReport:
    """Error probability of the square-root measurement (an upper bound).

    Computed without materializing the measurement: with ``C_n = S p_n rho_n``
    the success contribution of hypothesis ``n`` is ``tr(C_n C_n)``.
    """
    avg = sum(p * s.mat for p, s in zip(ensemble.priors, ensemble.states))
    inv_sqrt, _ = _pinv_sqrt(hermitize(avg))
    success = 0.0
    for p, state in zip(ensemble.priors, ensemble.states):
        if p == 0.0:
            continue
        c = inv_sqrt @ (p * state.mat)
        success += np.einsum("ij,ji->", c, c).real
    value = 1.0 - float(success)
    return BoundReport(value, KIND_UPPER, "pgm",
                       {"m": ensemble.m, "dim": ensemble.dim})


def fidelity_upper_bound(ensemble: StateEnsemble) -> BoundReport:
    """Pairwise-fidelity upper bound ``2 sum_{n<n'} sqrt(p_n p_n') F(rho_n, rho_n')``."""
    total = 0.0
    for i in range(ensemble.m):
        for j in range(i + 1, ensemble.m):
            total += 2.0 * np.sqrt(ensemble.priors[i] * ensemble.priors[j]) * \
                fidelity(ensemble.states[i], ensemble.states[j])
    return BoundReport(float(total), KIND_UPPER, "fidelity_pairwise_ub",
                       {"m": ensemble.m, "dim": ensemble.dim})


def fidelity_lower_bound(ensemble: StateEnsemble) -> BoundReport:
    """Pairwise-fidelity lower bound ``sum_{n<n'} p_n p_n' F(rho_n, rho_n')**2``."""
    total = 0.0
    for i in range(ensemble.m):
        for j in range(i + 1, ensemble.m):
            total += ensemble.priors[i] * ensemble.priors[j] * \
                fidelity(ensemble.states[i], ensemble.states[j]) ** 2
    return BoundReport(float(total), KIND_LOWER, "fidelity_pairwise_lb",
                       {"m": ensemble.m, "dim": ensemble.dim})


def helstrom_iterative(ensemble: StateEnsemble, tol: float = 1e-8,
                       max_iters: int = 5000, dim_guard: int = 256):
    """Minimum error probability of an ensemble via measurement iteration.

    Starting from the square-root measurement, alternates the fixed-point
    update ``Pi_n <- R^{-1/2} A_n R^{-1/2}`` with ``A_n = G_n Pi_n G_n``,
    ``G_n = p_n rho_n`` and ``R = sum_n A_n``, whose fixed points are the
    optimal measurements.  Optimality is certified through the operator
    ``Y = herm(sum_n G_n Pi_n)``: if ``Y - G_n`` is positive semidefinite
    for all ``n`` the measurement is exactly optimal, and in general the
    minimum error lies within ``dim * |min eigenvalue|`` below the reported
    value.  Iteration stops once that residual eigenvalue is above ``-tol``.

    Returns
    -------
    (BoundReport, Povm, float)
        The error probability of the best iterate, the measurement
        achieving it, and the certified gap: the true minimum error lies in
        ``[value - gap, value]``.
    """
    if ensemble.dim > dim_guard:
        raise DiscriminationError(
            f"dimension {ensemble.dim} exceeds solver guard {dim_guard}; compress first")
    dim = ensemble.dim
    weighted = [p * s.mat for p, s in zip(ensemble.priors, ensemble.states)]
    identity = np.eye(dim)
    elements = list(pgm_povm(ensemble).elements)

    best = None
    iterations = 0
    for iterations in range(1, max_iters + 1):
        raw = sum(g @ e for g, e in zip(weighted, elements))
        upsilon = (raw + raw.conj().T) / 2.0
        residual = min(np.linalg.eigvalsh(upsilon - g).min() for g in weighted)
        value = 1.0 - upsilon.trace().real
        gap = dim * max(0.0, -residual)
        if best is None or gap < best[1]:
            best = (value, gap, [e.copy() for e in elements], residual)
        if residual >= -tol:
            break
        updated = [g @ e @ g for g, e in zip(weighted, elements)]
        updated = [(a + a.conj().T) / 2.0 for a in updated]
        inv_sqrt, proj = _pinv_sqrt(sum(updated))
        filler = (identity - proj) / ensemble.m
        elements = [inv_sqrt @ a @ inv_sqrt + filler for a in updated]

    value, gap, elements, residual = best
    report = BoundReport(value, KIND_EXACT, "helstrom_iterative", {
        "m": ensemble.m, "dim": dim, "iterations": iterations,
        "residual": float(residual), "converged": residual >= -tol,
    })
    return report, Povm(elements), float(gap)


def continuity_lower_bound(error_probability: float, priors, deltas) -> float:
    """Error probability after perturbing each state within trace distance.

    If every state ``rho_n`` is replaced by a state within trace-norm
    distance ``deltas[n]``, the minimum error drops by at most
    ``sum_n p_n deltas[n] / 2``; the returned value lower-bounds the
    perturbed ensemble's minimum error.  It may be negative (vacuous).
    """
    priors = np.asarray(priors, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    if priors.shape != deltas.shape:
        raise DiscriminationError("priors and deltas must have matching shapes")
    if deltas.min() < 0.0:
        raise DiscriminationError("trace-norm distances must be >= 0")
    return float(error_probability - 0.5 * float(priors @ deltas))


def gus_unitary_helstrom(eta: float, m: int) -> BoundReport:
    """Minimum error for ``m`` equiprobable symmetric pure states.

    Applies to ensembles generated by a cyclic unitary from one pure state
    such that all pairwise overlaps equal the same real ``eta`` in [0, 1]
    (for channel ensembles, ``eta`` is the per-use overlap raised to the
    number of uses).  The square-root measurement is optimal and gives

        ``P = (m - 1) / m**2 * (sqrt(1 + (m-1) eta) - sqrt(1 - eta))**2``.
    """
    m = int(m)
    if m < 2:
        raise DiscriminationError(f"need at least 2 hypotheses, got m={m}")
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DiscriminationError(f"overlap must lie in [0, 1], got {eta}")
    root = np.sqrt(1.0 + (m - 1) * eta) - np.sqrt(1.0 - eta)
    value = (m - 1) / m**2 * root**2
    return BoundReport(float(value), KIND_EXACT, "gus_pure_ppm", {"eta": eta, "m": m})
