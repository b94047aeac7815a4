"""Bounds for locating one anomalous channel among ``m`` positions.

A position-finding instance is specified by a background channel occupying
``m - 1`` cells and a target channel occupying the remaining one, with a
flat prior over positions.  Probing every cell ``u`` times with arbitrary
adaptive, entangled strategies admits a lower bound built from channel
simulation: replace each cell by an ``M``-port teleportation simulation,
collect the resulting block states (tensor powers of cell Choi matrices),
and pay a continuity penalty ``u/2`` times the accumulated simulation
error.  This module provides the ensemble construction, the continuity
arithmetic, fidelity-based evaluations of the block bound, the port-count
optimization, and square-root-measurement upper bounds on compressed block
ensembles.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .channels import KrausChannel, choi
from .discrimination import (KIND_LOWER, KIND_UPPER, BoundReport, StateEnsemble,
                             fidelity_lower_bound, helstrom_iterative, pgm_error)
from .linalg import DensityMatrix, compressed_tensor_power, fidelity, tensor_all


class CpfError(ValueError):
    """Raised for invalid position-finding specifications."""


@dataclasses.dataclass(frozen=True, eq=False)
class CpfSpec:
    """One anomalous ``target`` cell among ``m``, the rest ``background``."""

    background: KrausChannel
    target: KrausChannel
    m: int
    u: int

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "u", int(self.u))
        if self.m < 2:
            raise CpfError(f"need m >= 2 cells, got {self.m}")
        if self.u < 1:
            raise CpfError(f"need u >= 1 uses, got {self.u}")
        same_in = self.background.dim_in == self.target.dim_in
        same_out = self.background.dim_out == self.target.dim_out
        if not (same_in and same_out):
            raise CpfError("background and target channels must share dimensions")


def build_cpf_choi_ensemble(spec: CpfSpec, max_dim: int = 4096) -> StateEnsemble:
    """The ``m`` hypothesis states built from single-use cell Choi matrices.

    Hypothesis ``n`` places the target Choi matrix in slot ``n`` (ascending
    slot order, first factor most significant) and the background Choi in
    every other slot.  The ensemble is equiprobable and geometrically
    uniform: the cyclic shift of :func:`cyclic_shift` maps hypothesis ``n``
    to ``n + 1 mod m``.
    """
    bg = choi(spec.background).mat
    tg = choi(spec.target).mat
    if bg.shape[0] ** spec.m > max_dim:
        raise CpfError(
            f"ambient dimension {bg.shape[0]}**{spec.m} exceeds guard {max_dim}; "
            f"use the compressed ensemble")
    states = []
    for n in range(spec.m):
        factors = [bg] * spec.m
        factors[n] = tg
        states.append(DensityMatrix(tensor_all(factors)))
    return StateEnsemble.equiprobable(states)


def cyclic_shift(cell_dim: int, m: int) -> np.ndarray:
    """Permutation matrix rotating ``m`` cells of size ``cell_dim`` up one slot."""
    cell_dim = int(cell_dim)
    m = int(m)
    if cell_dim < 1 or m < 1:
        raise CpfError("cell_dim and m must be positive")
    dim = cell_dim**m
    old = np.arange(dim)
    new = (old % cell_dim) * cell_dim ** (m - 1) + old // cell_dim
    mat = np.zeros((dim, dim), dtype=np.complex128)
    mat[new, old] = 1.0
    return mat


def cpf_sim_error(delta_background: float, delta_target: float, m: int) -> float:
    """Per-hypothesis simulation error of an ``m``-cell instance.

    Simulating every cell adds errors linearly: ``m - 1`` background cells
    plus one target cell, independent of where the target sits.  Since it is
    the same for all hypotheses it already equals its prior average.
    """
    m = int(m)
    if m < 2:
        raise CpfError(f"need m >= 2, got {m}")
    delta_background = float(delta_background)
    delta_target = float(delta_target)
    if delta_background < 0.0 or delta_target < 0.0:
        raise CpfError("simulation errors must be >= 0")
    return (m - 1) * delta_background + delta_target


def theorem1_lower_bound(block_error: float, u: int, delta_avg: float) -> BoundReport:
    """Adaptive-strategy lower bound from a block error and a simulation error.

    If the prior-averaged per-use simulation error is ``delta_avg``, any
    adaptive protocol with ``u`` uses errs at least

        ``block_error - u * delta_avg / 2``

    where ``block_error`` is the minimum error of the simulated block
    ensemble.  The value is reported raw; it may be negative when vacuous.
    """
    block_error = float(block_error)
    if not 0.0 <= block_error <= 1.0:
        raise CpfError(f"block error must lie in [0, 1], got {block_error}")
    u = int(u)
    if u < 1:
        raise CpfError(f"need u >= 1, got {u}")
    delta_avg = float(delta_avg)
    if delta_avg < 0.0:
        raise CpfError(f"simulation error must be >= 0, got {delta_avg}")
    return BoundReport(block_error - u * delta_avg / 2.0, KIND_LOWER,
                       "adaptive_continuity_lb",
                       {"block_error": block_error, "u": u, "delta_avg": delta_avg})


def general_fidelity_lb(ensemble: StateEnsemble, u: int, ports: int,
                        delta_avg: float) -> BoundReport:
    """Adaptive lower bound from pairwise fidelities of single-use states.

    Lower-bounds the block error of ``u * ports``-fold tensor powers via
    pairwise fidelities (which exponentiate across tensor products), then
    subtracts the continuity penalty:

        ``sum_{k<k'} p_k p_k' F(rho_k, rho_k')**(2 u ports) - u * delta_avg / 2``.
    """
    u = int(u)
    ports = int(ports)
    if u < 1 or ports < 1:
        raise CpfError("need u >= 1 and ports >= 1")
    delta_avg = float(delta_avg)
    if delta_avg < 0.0:
        raise CpfError(f"simulation error must be >= 0, got {delta_avg}")
    total = 0.0
    for i in range(ensemble.m):
        for j in range(i + 1, ensemble.m):
            pair = fidelity(ensemble.states[i], ensemble.states[j])
            total += ensemble.priors[i] * ensemble.priors[j] * pair ** (2 * u * ports)
    value = total - u * delta_avg / 2.0
    return BoundReport(value, KIND_LOWER, "general_fidelity_lb",
                       {"u": u, "ports": ports, "delta_avg": delta_avg, "m": ensemble.m})


def cpf_fidelity_lb(choi_fidelity: float, m: int, u: int, ports: int,
                    delta_avg: float) -> BoundReport:
    """Position-finding specialization of :func:`general_fidelity_lb`.

    Two hypotheses differ in exactly two slots (background vs target either
    way), so every pairwise ensemble fidelity equals the squared Choi
    fidelity ``F**2`` and the bound collapses to

        ``(m - 1) / (2 m) * F**(4 u ports) - u * delta_avg / 2``.
    """
    choi_fidelity = float(choi_fidelity)
    if not 0.0 <= choi_fidelity <= 1.0:
        raise CpfError(f"fidelity must lie in [0, 1], got {choi_fidelity}")
    m = int(m)
    u = int(u)
    ports = int(ports)
    if m < 2 or u < 1 or ports < 1:
        raise CpfError("need m >= 2, u >= 1 and ports >= 1")
    delta_avg = float(delta_avg)
    if delta_avg < 0.0:
        raise CpfError(f"simulation error must be >= 0, got {delta_avg}")
    value = (m - 1) / (2.0 * m) * choi_fidelity ** (4 * u * ports) - u * delta_avg / 2.0
    return BoundReport(value, KIND_LOWER, "cpf_fidelity_lb",
                       {"choi_fidelity": choi_fidelity, "m": m, "u": u,
                        "ports": ports, "delta_avg": delta_avg})


def cpf_nonadaptive_fidelity_lb(choi_fidelity: float, m: int, u: int) -> BoundReport:
    """Lower bound for block (non-adaptive) strategies, no simulation penalty."""
    choi_fidelity = float(choi_fidelity)
    if not 0.0 <= choi_fidelity <= 1.0:
        raise CpfError(f"fidelity must lie in [0, 1], got {choi_fidelity}")
    m = int(m)
    u = int(u)
    if m < 2 or u < 1:
        raise CpfError("need m >= 2 and u >= 1")
    value = (m - 1) / (2.0 * m) * choi_fidelity ** (4 * u)
    return BoundReport(value, KIND_LOWER, "cpf_nonadaptive_fidelity_lb",
                       {"choi_fidelity": choi_fidelity, "m": m, "u": u})


@dataclasses.dataclass(frozen=True)
class MOptimizationResult:
    """Outcome of maximizing a bound over the simulation port count."""

    best_ports: int
    best_value: float
    evaluations: tuple

    def __post_init__(self):
        values = [v for _, v in self.evaluations]
        if not values or max(values) != self.best_value:
            raise CpfError("best_value must be the maximum over the evaluations")


def optimize_over_M(bound_fn, ports_range=(1, 10**6), grid_points: int = 200) -> MOptimizationResult:
    """Maximize ``bound_fn(ports)`` over integer port counts.

    Starts from a geometric grid (endpoints always included), then zooms
    into the window between the evaluated neighbors of the running argmax
    until the window can be scanned exhaustively.  For bounds that are
    unimodal in the port count, as the simulation-based bounds here are,
    the returned optimum is the exact integer maximum.  Ties prefer the
    smaller port count.
    """
    lo, hi = int(ports_range[0]), int(ports_range[1])
    if lo < 1 or hi < lo:
        raise CpfError(f"invalid port range ({lo}, {hi})")
    grid_points = int(grid_points)
    if grid_points < 2:
        raise CpfError(f"need at least 2 grid points, got {grid_points}")

    evaluated = {}

    def ev(ports: int) -> float:
        if ports not in evaluated:
            evaluated[ports] = float(bound_fn(ports))
        return evaluated[ports]

    grid = np.rint(np.geomspace(lo, hi, num=min(grid_points, hi - lo + 1))).astype(np.int64)
    for ports in np.union1d(grid, [lo, hi]):
        ev(int(np.clip(ports, lo, hi)))

    for _ in range(60):
        best_ports = min(p for p, v in evaluated.items() if v == max(evaluated.values()))
        known = sorted(evaluated)
        pos = known.index(best_ports)
        left = known[pos - 1] if pos > 0 else best_ports
        right = known[pos + 1] if pos + 1 < len(known) else best_ports
        missing = (right - left - 1) - sum(1 for p in known if left < p < right)
        if missing <= 0:
            break
        if missing <= 2000:
            for ports in range(left + 1, right):
                ev(ports)
            break
        for ports in np.rint(np.geomspace(left, right, num=64)).astype(np.int64):
            ev(int(np.clip(ports, lo, hi)))

    best_value = max(evaluated.values())
    best_ports = min(p for p, v in evaluated.items() if v == best_value)
    evaluations = tuple(sorted(evaluated.items()))
    return MOptimizationResult(best_ports=best_ports, best_value=best_value,
                               evaluations=evaluations)


def compressed_cpf_ensemble(spec: CpfSpec, max_rank: int = 2048) -> StateEnsemble:
    """The ``u``-fold block ensemble, rotated into its joint support.

    Equivalent for every discrimination quantity to the ``u``-th tensor
    powers of the hypothesis Choi states, but never materializes the
    ambient ``dim**(m u)`` space.
    """
    base = build_cpf_choi_ensemble(spec)
    if spec.u == 1:
        return base
    mats = compressed_tensor_power([s.mat for s in base.states], spec.u, max_side=max_rank)
    states = [DensityMatrix(m, validate=False) for m in mats]
    return StateEnsemble(states, base.priors)


def cpf_pgm_upper(spec: CpfSpec, max_rank: int = 2048) -> BoundReport:
    """Square-root-measurement upper bound on the block error.

    Runs on the compressed block ensemble; raises once the joint support
    rank exceeds ``max_rank``.
    """
    report = pgm_error(compressed_cpf_ensemble(spec, max_rank=max_rank))
    return BoundReport(report.value, KIND_UPPER, "cpf_pgm_ub",
                       {"m": spec.m, "u": spec.u, "dim": report.params["dim"]})


def cpf_helstrom_iterative(spec: CpfSpec, tol: float = 1e-8, max_iters: int = 5000,
                           dim_guard: int = 256, max_rank: int = 2048):
    """Minimum block error of the compressed ensemble, with certificate.

    Returns the same ``(report, povm, gap)`` triple as
    :func:`~chandisc.discrimination.helstrom_iterative`.
    """
    ensemble = compressed_cpf_ensemble(spec, max_rank=max_rank)
    return helstrom_iterative(ensemble, tol=tol, max_iters=max_iters, dim_guard=dim_guard)


def cpf_block_fidelity_lb(spec: CpfSpec, max_rank: int = 2048) -> BoundReport:
    """Pairwise-fidelity lower bound evaluated on the compressed block states.

    Cross-check route for :func:`cpf_nonadaptive_fidelity_lb`: instead of
    exponentiating the Choi fidelity analytically, this measures the
    pairwise fidelities of the actual ``u``-fold states and feeds them to
    the general mixed-state bound.
    """
    report = fidelity_lower_bound(compressed_cpf_ensemble(spec, max_rank=max_rank))
    return BoundReport(report.value, KIND_LOWER, "cpf_block_fidelity_lb",
                       {"m": spec.m, "u": spec.u})
