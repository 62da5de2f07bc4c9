"""Quantum annuli, quantum conservative hyperbolae and the quantum cross.

An operator ``X`` with ``|X|, |X^-1| < r`` corresponds to the pair
``(Z, W) = (X/r, X^-1/r)`` with ``ZW = WZ = I/r^2`` and ``|Z|, |W| < 1``.
Letting ``r -> inf`` gives pairs of contractions with ``ZW = WZ = 0``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .errors import InvalidInputError, SingularMatrixError, UnsupportedError
from .laurent import is_infinite

DEFAULT_MARGIN = 1e-3
MEMBERSHIP_TOL = 1e-10


def parse_r(r):
    """Normalize ``r`` to a float > 1, allowing ``inf``/``"inf"``."""
    try:
        value = float(r)
    except (TypeError, ValueError):
        raise InvalidInputError(f"r must exceed 1 or be inf, got {r!r}") from None
    if math.isnan(value) or not value > 1:
        raise InvalidInputError("r must exceed 1 or be inf")
    return value


@dataclass(frozen=True, eq=False)
class HyperbolaPair:
    Z: np.ndarray
    W: np.ndarray
    r: float

    def __post_init__(self):
        Z = nk.as_cmatrix(self.Z)
        W = nk.as_cmatrix(self.W)
        if Z.shape != W.shape:
            raise InvalidInputError("Z and W must have the same shape")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "r", parse_r(self.r))

    @property
    def dim(self):
        return self.Z.shape[0]

    @property
    def is_cross(self):
        return is_infinite(self.r)

    @property
    def product(self):
        """``1/r^2``, zero on the cross."""
        return 0.0 if self.is_cross else 1.0 / self.r**2


@dataclass(frozen=True, eq=False)
class AnnulusOperator:
    """``X`` with all singular values in ``[1/(r - margin), r - margin]``."""

    X: np.ndarray
    r: float
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        X = nk.as_cmatrix(self.X)
        r = parse_r(self.r)
        if is_infinite(r):
            raise UnsupportedError("the annulus model needs finite r")
        if not 0 < self.margin < r - 1:
            raise InvalidInputError("margin must lie in (0, r - 1)")
        s = np.linalg.svd(X, compute_uv=False)
        bound = r - self.margin
        slack = 1e-12 * bound
        if s[0] > bound + slack or (s[-1] == 0 or 1.0 / s[-1] > bound + slack):
            raise InvalidInputError(
                f"singular values [{s[-1]:.6g}, {s[0]:.6g}] outside [1/{bound:.6g}, {bound:.6g}]"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    margins: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)


def membership(h, tol=MEMBERSHIP_TOL, closed=False):
    """Check the defining constraints of ``h``.

    ``margins`` hold ``1 - |Z|`` and ``1 - |W|``; ``residuals`` hold the
    product defects ``|ZW - I/r^2|`` and ``|WZ - I/r^2|``. Finite r requires
    strict norm inequalities unless ``closed`` is set; the cross always
    uses the closed ball.
    """
    I = nk.identity(h.dim)
    margins = {"norm_z": 1.0 - nk.operator_norm(h.Z), "norm_w": 1.0 - nk.operator_norm(h.W)}
    residuals = {
        "zw": float(np.linalg.norm(h.Z @ h.W - h.product * I, 2)),
        "wz": float(np.linalg.norm(h.W @ h.Z - h.product * I, 2)),
    }
    if h.is_cross or closed:
        norms_ok = all(m >= -tol for m in margins.values())
    else:
        norms_ok = all(m > 0 for m in margins.values())
    ok = norms_ok and all(v <= tol for v in residuals.values())
    return MembershipReport(ok, margins, residuals)


def hyperbola_from_annulus(a):
    return HyperbolaPair(a.X / a.r, nk.inverse(a.X) / a.r, a.r)


def annulus_from_hyperbola(h):
    """Inverse of :func:`hyperbola_from_annulus`; the margin is the actual slack of ``X = rZ``."""
    if h.is_cross:
        raise UnsupportedError("the cross has no annulus model (r = inf)")
    X = h.r * h.Z
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] == 0:
        raise SingularMatrixError("Z is singular")
    margin = h.r - max(s[0], 1.0 / s[-1])
    if margin <= 0:
        raise InvalidInputError("pair is not inside the open hyperbola")
    return AnnulusOperator(X, h.r, margin)


def sample_quantum_hyperbola(dim, r, margin=DEFAULT_MARGIN, seed=0):
    """Random interior point of the quantum hyperbola of type r.

    ``Z = V1 diag(a) V2^*`` with Haar ``V1, V2`` and ``a`` uniform in
    ``[1/r^2 + margin, 1 - margin]``; ``W = Z^-1 / r^2``.
    """
    dim = nk.check_dim(dim)
    r = parse_r(r)
    if is_infinite(r):
        raise InvalidInputError("use sample_quantum_cross for r = inf")
    r2 = r * r
    if not 0 < margin < (1.0 - 1.0 / r2) / 2.0:
        raise InvalidInputError("margin must lie in (0, (1 - 1/r^2)/2)")
    rng = np.random.default_rng(seed)
    V1 = nk.haar_unitary(dim, rng)
    V2 = nk.haar_unitary(dim, rng)
    a = rng.uniform(1.0 / r2 + margin, 1.0 - margin, size=dim)
    Z = (V1 * a) @ nk.adjoint(V2)
    W = (V2 * (1.0 / (r2 * a))) @ nk.adjoint(V1)
    return HyperbolaPair(Z, W, r)


def structured_cross_pair(Q, k, X, Y):
    """``Z = Q P X (I-P) Q^*``, ``W = Q P Y (I-P) Q^*`` with ``P`` the projection on the first ``k`` coordinates."""
    n = Q.shape[0]
    mask = np.zeros((n, n))
    mask[:k, k:] = 1.0
    Z = Q @ (mask * X) @ nk.adjoint(Q)
    W = Q @ (mask * Y) @ nk.adjoint(Q)
    return HyperbolaPair(Z, W, math.inf)


def _rescale(M, rng):
    norm = np.linalg.norm(M, 2)
    if norm == 0:
        return M
    return M * (rng.uniform(0.05, 0.99) / norm)


def _gaussian(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def sample_quantum_cross(dim, seed=0, mode="structured"):
    """Random pair of contractions with ``ZW = WZ = 0``.

    ``structured``: both operators map the complement of a random rank-k
    subspace into it, so both are nilpotent. ``general``: ``Z`` of random
    rank, ``W`` built from ``ker Z`` and ``(ran Z)^perp``; when ``Z`` is
    invertible this forces ``W = 0``.
    """
    dim = nk.check_dim(dim)
    rng = np.random.default_rng(seed)
    if mode == "structured":
        if dim < 2:
            return HyperbolaPair(np.zeros((1, 1)), np.zeros((1, 1)), math.inf)
        Q = nk.haar_unitary(dim, rng)
        k = int(rng.integers(1, dim))
        h = structured_cross_pair(Q, k, _gaussian(rng, dim), _gaussian(rng, dim))
        return HyperbolaPair(_rescale(h.Z, rng), _rescale(h.W, rng), math.inf)
    if mode == "general":
        V1 = nk.haar_unitary(dim, rng)
        V2 = nk.haar_unitary(dim, rng)
        k = int(rng.integers(1, dim + 1))
        s = np.zeros(dim)
        s[:k] = rng.uniform(0.05, 1.0, size=k)
        Z = (V1 * s) @ nk.adjoint(V2)
        ker_z = V2[:, k:]
        coran_z = V1[:, k:]
        G = _gaussian(rng, dim)
        W = ker_z @ nk.adjoint(ker_z) @ G @ coran_z @ nk.adjoint(coran_z)
        return HyperbolaPair(_rescale(Z, rng), _rescale(W, rng), math.inf)
    raise InvalidInputError(f"unknown cross sampler mode {mode!r}")
