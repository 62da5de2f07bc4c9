"""Dense complex linear algebra used by the rest of the package.

All matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Functions never mutate their inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    InvalidInputError,
    NotACrossPairError,
    NotHermitianError,
    NotPSDError,
    NumericFailure,
    SingularMatrixError,
)

MAX_DIM = 64
SINGULAR_RTOL = 1e-12
CLAMP_TOL = 1e-10
HERMITIAN_TOL = 1e-10
CROSS_TOL = 1e-10


def check_dim(dim, max_dim=MAX_DIM):
    if int(dim) != dim or dim < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {dim!r}")
    if max_dim is not None and dim > max_dim:
        raise InvalidInputError(f"dimension {dim} exceeds cap {max_dim}")
    return int(dim)


def as_cmatrix(M):
    """Validate ``M`` as a finite square matrix and return it as complex128."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("matrix has non-finite entries")
    return M


def identity(dim):
    return np.eye(dim, dtype=np.complex128)


def adjoint(M):
    return M.conj().T


@dataclass(frozen=True)
class SvdResult:
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return (self.left * self.singular_values) @ adjoint(self.right)


def svd(M):
    """Full SVD with ``M = left @ diag(s) @ right^*`` and ``s`` descending."""
    M = as_cmatrix(M)
    try:
        P, s, Qh = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("SVD did not converge", {"shape": M.shape}) from exc
    return SvdResult(P, s, adjoint(Qh))


def operator_norm(M):
    """Spectral norm (largest singular value)."""
    M = as_cmatrix(M)
    return float(np.linalg.norm(M, 2))


def eigenvalues(M):
    M = as_cmatrix(M)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(
            "eigenvalue iteration did not converge",
            {"shape": M.shape, "norm": float(np.linalg.norm(M))},
        ) from exc


def _ensure_invertible(s):
    if s[-1] <= SINGULAR_RTOL * s[0] or s[0] == 0.0:
        raise SingularMatrixError(
            f"smallest singular value {s[-1]:.3e} is below {SINGULAR_RTOL:g} * {s[0]:.3e}"
        )


def inverse(M):
    M = as_cmatrix(M)
    _ensure_invertible(np.linalg.svd(M, compute_uv=False))
    return np.linalg.inv(M)


def hermitian_part(M):
    return 0.5 * (M + adjoint(M))


def psd_sqrt(Hm, clamp_tol=CLAMP_TOL):
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are rounded up to zero; anything more
    negative raises :class:`NotPSDError`.
    """
    Hm = as_cmatrix(Hm)
    scale = 1.0 + np.linalg.norm(Hm, 2)
    if np.linalg.norm(Hm - adjoint(Hm), 2) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    evals, evecs = np.linalg.eigh(hermitian_part(Hm))
    if evals[0] < -clamp_tol:
        raise NotPSDError(f"eigenvalue {evals[0]:.3e} below -{clamp_tol:g}")
    roots = np.sqrt(np.clip(evals, 0.0, None))
    return (evecs * roots) @ adjoint(evecs)


def polar(M):
    """Right polar decomposition ``M = U @ A`` of an invertible matrix.

    ``U`` is unitary and ``A = (M^* M)^{1/2}``. Singular inputs are refused;
    use :func:`common_polar_unitary` for pairs on the cross.
    """
    res = svd(M)
    _ensure_invertible(res.singular_values)
    U = res.left @ adjoint(res.right)
    A = (res.right * res.singular_values) @ adjoint(res.right)
    return U, hermitian_part(A)


def modulus(M):
    """``(M^* M)^{1/2}`` from the SVD; avoids square roots of rounding noise on the kernel."""
    res = svd(M)
    return hermitian_part((res.right * res.singular_values) @ adjoint(res.right))


def unitary_factor(M):
    """Unitary polar factor of any square matrix (not unique if ``M`` is singular)."""
    res = svd(M)
    return res.left @ adjoint(res.right)


def _orth_complement(B, dim):
    if B.shape[1] == 0:
        return identity(dim)
    if B.shape[1] == dim:
        return np.zeros((dim, 0), dtype=np.complex128)
    return scipy.linalg.null_space(adjoint(B))


def common_polar_unitary(Z, W, tol=CROSS_TOL, rank_tol=1e-11):
    """One unitary ``U`` with ``Z = U|Z|`` and ``W = |W^*| U^*`` for a cross pair.

    Because ``ZW = WZ = 0`` the supports of ``|Z|`` and ``|W^*|`` are
    orthogonal, and so are the ranges of ``Z`` and ``W^*``. The partial
    isometries coming from the two SVDs therefore glue together; whatever
    is left is completed by the unitary closest to the identity between the
    residual subspaces (the identity itself when they coincide).
    """
    Z = as_cmatrix(Z)
    W = as_cmatrix(W)
    if Z.shape != W.shape:
        raise InvalidInputError("Z and W must have the same shape")
    n = Z.shape[0]
    zw = np.linalg.norm(Z @ W, 2)
    wz = np.linalg.norm(W @ Z, 2)
    if zw > tol or wz > tol:
        raise NotACrossPairError(f"|ZW| = {zw:.3e}, |WZ| = {wz:.3e} exceed {tol:g}")

    sz = svd(Z)
    sw = svd(adjoint(W))
    kz = int(np.sum(sz.singular_values > rank_tol * max(1.0, sz.singular_values[0])))
    kw = int(np.sum(sw.singular_values > rank_tol * max(1.0, sw.singular_values[0])))
    assert kz + kw <= n, "rank count exceeds dimension for a cross pair"

    # Z maps right[:, i] -> left[:, i]; W^* = U|W^*| likewise
    D = np.hstack([sz.right[:, :kz], sw.right[:, :kw]])
    R = np.hstack([sz.left[:, :kz], sw.left[:, :kw]])
    U = R @ adjoint(D)
    D_res = _orth_complement(D, n)
    R_res = _orth_complement(R, n)
    assert D_res.shape[1] == R_res.shape[1] == n - kz - kw, "residual dimension mismatch"
    if D_res.shape[1]:
        omega = unitary_factor(adjoint(R_res) @ D_res)
        U = U + R_res @ omega @ adjoint(D_res)
    return unitary_factor(U)


def random_unitary(dim, seed):
    """Haar-random unitary, deterministic in ``(dim, seed)``."""
    dim = check_dim(dim, max_dim=None)
    rng = np.random.default_rng(seed)
    return haar_unitary(dim, rng)


def haar_unitary(dim, rng):
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    phases = d / np.abs(d)
    return Q * phases


def match_spectra(a, b):
    """Largest distance in the optimal one-to-one pairing of two equal-size multisets."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.size != b.size:
        raise InvalidInputError("multisets must have equal size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def directed_distance(a, b):
    """``max_{x in a} min_{y in b} |x - y|``; measures how far ``a`` is from inclusion in ``b``."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.size == 0:
        return 0.0
    if b.size == 0:
        return float("inf")
    return float(np.abs(a[:, None] - b[None, :]).min(axis=1).max())


def eigen_match_tolerance(M, base=1e-7):
    """Pairing tolerance scaled by ``dim * |M|`` as used for spectral inclusion checks."""
    M = as_cmatrix(M)
    return base * M.shape[0] * max(1.0, operator_norm(M))
