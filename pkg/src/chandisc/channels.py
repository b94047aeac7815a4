"""Channel families, Choi matrices, and teleportation-simulation errors.

The three channel families used throughout the package are quantum erasure
channels (``make_qec``), qudit depolarizing channels (``make_qdc``) and qubit
amplitude damping channels (``make_qadc``).  All are represented by explicit
Kraus operators, and every derived object (Choi matrix, output state) is a
validated :class:`~chandisc.linalg.DensityMatrix`.

Simulation errors quantify how well a channel can be replaced by a
teleportation-style protocol consuming a fixed program state with ``M``
ports.  They feed the adaptive-strategy lower bounds: an adaptive protocol
probing a simulable channel ``u`` times can be traded for a block protocol at
the cost of ``u/2`` times the simulation error in trace distance.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .linalg import DensityMatrix, as_complex_matrix, hermitize


class ChannelError(ValueError):
    """Raised for invalid channel parameters or mismatched dimensions."""


TP_TOL = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class KrausChannel:
    """A completely positive trace-preserving map in Kraus form.

    ``kraus`` is a tuple of ``(dim_out, dim_in)`` matrices ``K_i`` with
    ``sum_i K_i† K_i = I`` within ``TP_TOL``.
    """

    kraus: tuple

    def __post_init__(self):
        ops = tuple(as_complex_matrix(k) for k in self.kraus)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ChannelError("Kraus operators differ in shape")
        total = sum(k.conj().T @ k for k in ops)
        drift = np.abs(total - np.eye(shape[1])).max()
        if drift > TP_TOL:
            raise ChannelError(f"channel is not trace preserving: drift {drift:.3e}")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __repr__(self):
        return f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={len(self.kraus)})"


def _check_prob(q, name="q") -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ChannelError(f"{name} must lie in [0, 1], got {q}")
    return q


def make_qec(d: int, q) -> KrausChannel:
    """Erasure channel on a ``d``-level system.

    With probability ``1 - q`` the input passes into the first ``d`` levels
    of a ``d + 1``-dimensional output; with probability ``q`` it is replaced
    by the orthogonal erasure flag (the last output level).
    """
    d = int(d)
    if d < 2:
        raise ChannelError(f"erasure channel needs d >= 2, got {d}")
    q = _check_prob(q)
    iso = np.zeros((d + 1, d), dtype=np.complex128)
    iso[:d, :] = np.eye(d)
    ops = [np.sqrt(1.0 - q) * iso]
    for j in range(d):
        k = np.zeros((d + 1, d), dtype=np.complex128)
        k[d, j] = np.sqrt(q)
        ops.append(k)
    return KrausChannel(tuple(ops))


def heisenberg_weyl(d: int):
    """The ``d**2`` shift-and-phase unitaries ``X^a Z^b`` on dimension ``d``.

    Ordered lexicographically in ``(a, b)`` so the identity comes first.
    These are exactly the correction unitaries appearing in qudit
    teleportation.
    """
    d = int(d)
    if d < 2:
        raise ChannelError(f"need d >= 2, got {d}")
    omega = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        x[(j + 1) % d, j] = 1.0
    z = np.diag(omega ** np.arange(d))
    ops = []
    xa = np.eye(d, dtype=np.complex128)
    for _ in range(d):
        zb = np.eye(d, dtype=np.complex128)
        for _ in range(d):
            ops.append(xa @ zb)
            zb = zb @ z
        xa = xa @ x
    return ops


def make_qdc(d: int, q) -> KrausChannel:
    """Depolarizing channel on a ``d``-level system.

    With probability ``q`` the input is replaced by the maximally mixed
    state; equivalently each of the ``d**2 - 1`` non-identity shift-and-phase
    unitaries is applied with probability ``q / d**2``.
    """
    d = int(d)
    if d < 2:
        raise ChannelError(f"depolarizing channel needs d >= 2, got {d}")
    q = _check_prob(q)
    unitaries = heisenberg_weyl(d)
    ops = [np.sqrt(1.0 - q + q / d**2) * unitaries[0]]
    ops.extend(np.sqrt(q / d**2) * w for w in unitaries[1:])
    return KrausChannel(tuple(ops))


def make_qadc(q) -> KrausChannel:
    """Amplitude damping channel on a qubit with decay probability ``q``."""
    q = _check_prob(q)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - q)]], dtype=np.complex128)
    k1 = np.array([[0.0, np.sqrt(q)], [0.0, 0.0]], dtype=np.complex128)
    return KrausChannel((k0, k1))


def apply(channel: KrausChannel, rho) -> DensityMatrix:
    """Apply a channel to a state: ``sum_i K_i rho K_i†``."""
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if rho.dim != channel.dim_in:
        raise ChannelError(f"state dimension {rho.dim} does not match channel input {channel.dim_in}")
    out = sum(k @ rho.mat @ k.conj().T for k in channel.kraus)
    return DensityMatrix(hermitize(out))


def maximally_entangled(d: int) -> DensityMatrix:
    """The rank-one projector on ``sum_i |ii> / sqrt(d)``."""
    d = int(d)
    vec = np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)
    return DensityMatrix(np.outer(vec, vec.conj()))


def choi(channel: KrausChannel) -> DensityMatrix:
    """Choi matrix of a channel, ordered as output tensor idler.

    This is the channel applied to one half of a maximally entangled pair,
    ``(E ⊗ id)(|Ω><Ω|)`` with ``|Ω> = sum_i |ii> / sqrt(d_in)``.  In this
    (row-major) convention the Choi matrix is ``sum_i vec(K_i) vec(K_i)† / d_in``.
    """
    d = channel.dim_in
    mat = np.zeros((channel.dim_out * d,) * 2, dtype=np.complex128)
    for k in channel.kraus:
        v = k.reshape(-1)
        mat += np.outer(v, v.conj())
    return DensityMatrix(mat / d)


SIM_ERROR_KINDS = ("uniform_bound", "qadc_specific", "exact_zero")


@dataclasses.dataclass(frozen=True)
class SimulationError:
    """Trace-norm accuracy of a port-based channel simulation.

    ``value`` bounds the diamond-norm distance between the channel and its
    simulation through an ``M = ports`` port teleportation protocol.  The
    bound is not clamped: small ``M`` can give values above the trivial
    distance 2, which simply makes the downstream lower bounds vacuous.
    """

    value: float
    ports: int
    kind: str

    def __post_init__(self):
        if self.kind not in SIM_ERROR_KINDS:
            raise ChannelError(f"unknown simulation error kind {self.kind!r}")
        if self.value < 0.0:
            raise ChannelError(f"simulation error must be >= 0, got {self.value}")
        if self.ports < 1:
            raise ChannelError(f"port count must be >= 1, got {self.ports}")


def pbt_error_bound(d: int, ports: int) -> SimulationError:
    """Universal port-based simulation error ``2 d (d - 1) / M`` in dimension ``d``.

    Valid for any channel with input dimension ``d``; it decays only linearly
    in the number of ports but requires no structure from the channel.
    """
    d = int(d)
    ports = int(ports)
    if d < 2:
        raise ChannelError(f"need d >= 2, got {d}")
    if ports < 1:
        raise ChannelError(f"need ports >= 1, got {ports}")
    return SimulationError(2.0 * d * (d - 1) / ports, ports, "uniform_bound")


def default_xi(ports: int) -> float:
    """Default port scaling for the amplitude damping simulation error."""
    return min(4.0 / int(ports), 2.0)


def qadc_pbt_error(q, ports: int, xi=None) -> SimulationError:
    """Port-based simulation error for the amplitude damping channel.

    ``xi`` is the port-dependent prefactor; by default ``min(4 / M, 2)``.
    The damping-dependent factor ``(1 - q)/2 + sqrt(1 - q)`` vanishes at
    ``q = 1``, where the channel becomes a constant map that is simulable
    exactly.
    """
    q = _check_prob(q)
    ports = int(ports)
    if ports < 1:
        raise ChannelError(f"need ports >= 1, got {ports}")
    xi = default_xi(ports) if xi is None else float(xi)
    if xi < 0.0:
        raise ChannelError(f"xi must be >= 0, got {xi}")
    value = xi * ((1.0 - q) / 2.0 + np.sqrt(1.0 - q))
    return SimulationError(value, ports, "qadc_specific")


def zero_sim_error() -> SimulationError:
    """Exact single-port simulation, available for tele-covariant channels."""
    return SimulationError(0.0, 1, "exact_zero")


def _correction_exists(c, c_u, dim_out: int, dim_in: int, tol: float) -> bool:
    # Solve the linear condition (V ⊗ I) C = C_U (V ⊗ I) for V, then look
    # for a unitary inside the solution space via polar projections.
    big = dim_out * dim_in
    cols = []
    for a in range(dim_out):
        for b in range(dim_out):
            e_ab = np.zeros((dim_out, dim_out), dtype=np.complex128)
            e_ab[a, b] = 1.0
            lifted = np.kron(e_ab, np.eye(dim_in))
            cols.append((lifted @ c - c_u @ lifted).reshape(-1))
    lmat = np.array(cols).T  # (big², dim_out²)
    u_, s, vh = np.linalg.svd(lmat, full_matrices=False)
    null_mask = s <= 1e-6 * max(1.0, s[0] if s.size else 0.0)
    null_vecs = vh[null_mask].conj()
    if not null_vecs.shape[0]:
        return False

    def is_valid(candidate) -> bool:
        pu, _, pvh = np.linalg.svd(candidate)
        v = pu @ pvh
        lifted = np.kron(v, np.eye(dim_in))
        return np.abs(lifted @ c @ lifted.conj().T - c_u).max() <= tol

    for vec in null_vecs:
        if is_valid(vec.reshape(dim_out, dim_out)):
            return True
    rng = np.random.default_rng(12345)
    for _ in range(8):
        coeff = rng.standard_normal(null_vecs.shape[0]) + 1j * rng.standard_normal(null_vecs.shape[0])
        cand = (coeff @ null_vecs).reshape(dim_out, dim_out)
        if is_valid(cand):
            return True
    return False


def tele_covariance_check(channel: KrausChannel, tol: float = 1e-8) -> bool:
    """Whether teleportation corrections can be pushed through the channel.

    For every shift-and-phase unitary ``U`` on the input, checks that some
    unitary ``V`` on the output satisfies ``E ∘ Ad_U = Ad_V ∘ E``.  Channels
    with this property are simulable exactly by a single teleportation over
    their Choi state, so all their adaptive discrimination bounds collapse
    to block bounds.  Erasure and depolarizing channels pass; amplitude
    damping fails (it is phase- but not flip-covariant).
    """
    c = np.asarray(choi(channel).mat)
    d_in, d_out = channel.dim_in, channel.dim_out
    for u in heisenberg_weyl(d_in)[1:]:
        c_u = np.kron(np.eye(d_out), u.T) @ c @ np.kron(np.eye(d_out), u.conj())
        if not _correction_exists(c, c_u, d_out, d_in, tol):
            return False
    return True
