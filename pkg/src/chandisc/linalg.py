"""Dense complex-matrix primitives shared by every bound computation.

Everything here works on plain ``numpy.ndarray`` data in column conventions:
states are square complex128 matrices, subspace bases are tall matrices with
orthonormal columns.  The helpers deliberately stay small; the point of the
module is to give the rest of the package one vetted implementation of the
handful of operations (tensoring, trace norm, fidelity, support compression)
whose numerical details are easy to get subtly wrong.
"""

from __future__ import annotations

import numpy as np

# Tolerances used across the package.  HERM_TOL / EIG_TOL / TRACE_TOL gate
# state validation; ISOMETRY_TOL gates basis validation; SUPPORT_CUT decides
# which eigenvalues count as part of a state's support.
HERM_TOL = 1e-10
EIG_TOL = 1e-10
TRACE_TOL = 1e-10
ISOMETRY_TOL = 1e-9
SUPPORT_CUT = 1e-10

# Reject tensor products whose side length would exceed this.
MAX_TENSOR_SIDE = 1 << 20


class LinalgError(ValueError):
    """Raised when an input violates a documented precondition."""


def as_complex_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array.

    Raises
    ------
    LinalgError
        If the input is not 2-D or contains non-finite entries.
    """
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2:
        raise LinalgError(f"expected a 2-D array, got ndim={mat.ndim}")
    if not np.all(np.isfinite(mat)):
        raise LinalgError("matrix contains non-finite entries")
    return mat


def hermitize(mat, tol: float = 1e-8) -> np.ndarray:
    """Return the Hermitian part ``(M + M†)/2`` of a nearly Hermitian matrix.

    The symmetrization is a cleanup step for floating-point drift, not a
    projection of arbitrary matrices: if the correction exceeds ``tol`` in
    max-abs norm the input was not Hermitian to begin with and we refuse it.
    """
    mat = as_complex_matrix(mat)
    if mat.shape[0] != mat.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {mat.shape}")
    herm = (mat + mat.conj().T) / 2.0
    drift = np.abs(mat - herm).max() if mat.size else 0.0
    if drift > tol:
        raise LinalgError(f"matrix is not Hermitian: drift {drift:.3e} > {tol:.3e}")
    return herm


class DensityMatrix:
    """A validated quantum state.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.  With ``validate=True`` (the default) it must
        be Hermitian within ``HERM_TOL``, have unit trace within
        ``TRACE_TOL`` and eigenvalues above ``-EIG_TOL``.
    validate : bool
        Skip the eigenvalue/trace checks.  Internal hot paths that construct
        states which are positive by construction (e.g. compressed tensor
        powers) pass ``False``; external inputs should not.
    """

    __slots__ = ("mat",)

    def __init__(self, mat, *, validate: bool = True):
        mat = as_complex_matrix(mat)
        if mat.shape[0] != mat.shape[1]:
            raise LinalgError(f"state must be square, got shape {mat.shape}")
        if validate:
            mat = hermitize(mat, HERM_TOL)
            tr = mat.trace()
            if abs(tr - 1.0) > TRACE_TOL:
                raise LinalgError(f"state trace {tr} deviates from 1 beyond {TRACE_TOL}")
            if np.linalg.eigvalsh(mat).min() < -EIG_TOL:
                raise LinalgError("state has an eigenvalue below the PSD tolerance")
        mat = np.array(mat, dtype=np.complex128, copy=True)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class SubspaceBasis:
    """Orthonormal basis of a subspace, stored as a ``(dim, rank)`` isometry."""

    __slots__ = ("isometry",)

    def __init__(self, isometry, *, validate: bool = True):
        iso = as_complex_matrix(isometry)
        if iso.shape[1] > iso.shape[0]:
            raise LinalgError(f"basis cannot have rank {iso.shape[1]} in dimension {iso.shape[0]}")
        if validate:
            gram = iso.conj().T @ iso
            drift = np.abs(gram - np.eye(iso.shape[1])).max()
            if drift > ISOMETRY_TOL:
                raise LinalgError(f"columns are not orthonormal: drift {drift:.3e}")
        iso = np.array(iso, dtype=np.complex128, copy=True)
        iso.setflags(write=False)
        object.__setattr__(self, "isometry", iso)

    @property
    def ambient_dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def rank(self) -> int:
        return self.isometry.shape[1]

    def restrict(self, mat) -> np.ndarray:
        """Conjugate an ambient operator into this basis: ``B† M B``."""
        mat = as_complex_matrix(mat)
        return self.isometry.conj().T @ mat @ self.isometry

    def __repr__(self):
        return f"SubspaceBasis(ambient_dim={self.ambient_dim}, rank={self.rank})"


def tensor(a, b, max_side: int = MAX_TENSOR_SIDE) -> np.ndarray:
    """Kronecker product with a guard against absurd output sizes."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    side = max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    if side > max_side:
        raise LinalgError(f"tensor product side {side} exceeds guard {max_side}")
    return np.kron(a, b)


def tensor_all(mats, max_side: int = MAX_TENSOR_SIDE) -> np.ndarray:
    """Left-associated Kronecker product of a sequence of matrices."""
    mats = list(mats)
    if not mats:
        raise LinalgError("tensor_all needs at least one factor")
    out = as_complex_matrix(mats[0])
    for m in mats[1:]:
        out = tensor(out, m, max_side=max_side)
    return out


def partial_trace(mat, dims, keep) -> np.ndarray:
    """Trace out all tensor factors except those listed in ``keep``.

    Parameters
    ----------
    mat : array_like
        Square matrix on a tensor-product space with factor sizes ``dims``
        (first factor most significant, matching ``numpy.kron`` order).
    dims : sequence of int
    keep : sequence of int
        Indices of factors to retain, in ascending order.
    """
    mat = as_complex_matrix(mat)
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(int(k) for k in keep))
    n = len(dims)
    if mat.shape[0] != np.prod(dims) or mat.shape[0] != mat.shape[1]:
        raise LinalgError("matrix shape does not match the factor dimensions")
    if any(k < 0 or k >= n for k in keep):
        raise LinalgError("keep indices out of range")
    tensor_form = mat.reshape(dims + dims)
    # Trace highest factors first so lower axis indices stay valid.
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        tensor_form = np.trace(tensor_form, axis1=ax, axis2=ax + tensor_form.ndim // 2)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tensor_form.reshape(kept_dim, kept_dim)


def trace_norm(mat) -> float:
    """Sum of singular values; for Hermitian input, the sum of |eigenvalues|."""
    mat = as_complex_matrix(mat)
    if mat.shape[0] != mat.shape[1]:
        return float(np.linalg.svd(mat, compute_uv=False).sum())
    if np.abs(mat - mat.conj().T).max() <= 1e-10:
        herm = (mat + mat.conj().T) / 2.0
        return float(np.abs(np.linalg.eigvalsh(herm)).sum())
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def _psd_sqrt(mat) -> np.ndarray:
    # mat must already be Hermitian; small negative eigenvalues are clipped.
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``tr|√ρ √σ|`` of two states, clipped to [0, 1].

    Accepts ``DensityMatrix`` or raw arrays; raw arrays are validated.
    """
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    sigma = sigma if isinstance(sigma, DensityMatrix) else DensityMatrix(sigma)
    if rho.dim != sigma.dim:
        raise LinalgError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    prod = _psd_sqrt(hermitize(rho.mat, 1e-8)) @ _psd_sqrt(hermitize(sigma.mat, 1e-8))
    val = float(np.linalg.svd(prod, compute_uv=False).sum())
    if val > 1.0 + 1e-9:
        raise LinalgError(f"fidelity {val} exceeds 1 beyond tolerance")
    return min(max(val, 0.0), 1.0)


def _support_factor(mat, cut: float = SUPPORT_CUT):
    """Factor a PSD matrix as ``V diag(w) V†`` keeping eigenvalues > cut."""
    w, v = np.linalg.eigh(hermitize(mat, 1e-8))
    keep = w > cut
    return v[:, keep], w[keep]


def _left_singular_columns(mat, cut: float) -> np.ndarray:
    """Left singular vectors of ``mat`` with singular values above ``cut``.

    The divide-and-conquer SVD occasionally fails to converge on residual
    blocks whose spectrum straddles the cut; the Hermitian augmentation
    ``[[0, A], [A^H, 0]]`` has the same singular triplets as eigenpairs and
    its eigensolver converges unconditionally, so it serves as a fallback.
    """
    try:
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        n, k = mat.shape
        aug = np.zeros((n + k, n + k), dtype=np.complex128)
        aug[:n, n:] = mat
        aug[n:, :n] = mat.conj().T
        vals, vecs = np.linalg.eigh(aug)
        order = np.argsort(vals)[::-1][: min(n, k)]
        s = vals[order]
        u = vecs[:n, order] * np.sqrt(2.0)
    return u[:, s > cut]


def _extend_orthonormal(basis, block, cut: float = 1e-8) -> np.ndarray:
    """Append to ``basis`` an orthonormal basis for the new directions of ``block``.

    ``basis`` has orthonormal columns (possibly zero of them).  One
    re-orthogonalization pass plus an SVD rank cut keeps the result
    orthonormal to machine precision even when ``block`` lies almost
    entirely inside the existing span.
    """
    if basis.shape[1]:
        resid = block - basis @ (basis.conj().T @ block)
        resid -= basis @ (basis.conj().T @ resid)
    else:
        resid = block
    u = _left_singular_columns(resid, cut)
    if not u.shape[1]:
        return basis
    return np.hstack([basis, u])


def _joint_basis(factors) -> np.ndarray:
    """Orthonormal basis for the union of the column spans of ``factors``."""
    dim = factors[0].shape[0]
    basis = np.zeros((dim, 0), dtype=np.complex128)
    for block in factors:
        basis = _extend_orthonormal(basis, block)
    return basis


def joint_support_compress(states):
    """Rotate an ensemble into the joint support of its members.

    Parameters
    ----------
    states : sequence of DensityMatrix

    Returns
    -------
    (SubspaceBasis, list of DensityMatrix)
        The basis ``B`` of the joint support and the states ``B† ρ B``.
        Every trace norm of a real linear combination of the inputs is
        preserved, so all distance-based bounds can be computed downstream
        at the compressed dimension.
    """
    states = list(states)
    if not states:
        raise LinalgError("need at least one state")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise LinalgError("states live on different dimensions")
    factored = [_support_factor(s.mat) for s in states]
    basis = _joint_basis([v for v, _ in factored])
    sub = SubspaceBasis(basis)
    compressed = []
    for v, w in factored:
        proj = basis.conj().T @ v
        compressed.append(DensityMatrix((proj * w) @ proj.conj().T, validate=False))
    return sub, compressed


def compressed_tensor_power(states, power: int, max_side: int = MAX_TENSOR_SIDE):
    """u-fold tensor powers of an ensemble, in their joint support basis.

    The ambient dimension ``dim**power`` is never materialized.  Each state
    is kept in factored form ``V diag(w) V†``; tensor powers act on the
    factors and a joint re-orthonormalization after every doubling keeps the
    working dimension at the joint support rank.  All pairwise distance and
    overlap measures of the returned ensemble match the uncompressed tensor
    powers because every state is conjugated by one common isometry.

    Parameters
    ----------
    states : sequence of array_like or DensityMatrix
    power : int
        Tensor power ``u >= 1``.

    Returns
    -------
    list of numpy.ndarray
        The compressed states, all square of the joint support rank.
    """
    power = int(power)
    if power < 1:
        raise LinalgError(f"tensor power must be >= 1, got {power}")
    mats = [s.mat if isinstance(s, DensityMatrix) else as_complex_matrix(s) for s in states]
    if not mats:
        raise LinalgError("need at least one state")

    def compress(factored):
        basis = _joint_basis([v for v, _ in factored])
        if basis.shape[1] > max_side:
            raise LinalgError(f"compressed rank {basis.shape[1]} exceeds guard {max_side}")
        return [(basis.conj().T @ v, w) for v, w in factored]

    def pairwise(left, right):
        out = [(np.kron(lv, rv), np.kron(lw, rw)) for (lv, lw), (rv, rw) in zip(left, right)]
        return compress(out)

    base = compress([_support_factor(m) for m in mats])
    result = None
    square = base
    remaining = power
    while remaining:
        if remaining & 1:
            result = square if result is None else pairwise(result, square)
        remaining >>= 1
        if remaining:
            square = pairwise(square, square)
    return [(v * w) @ v.conj().T for v, w in result]
