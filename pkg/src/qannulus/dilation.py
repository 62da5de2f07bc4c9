"""Minimal 2x dilation of a hyperbola (or cross) pair to the unit-norm boundary.

Given ``(Z, W)`` with polar decomposition ``Z = U A`` (so ``W = A_hat U^*``)
the dilation is

    Z_hat = [[Z, H], [0, W^*]],    W_hat = [[W, -H^*], [0, Z^*]],
    H = U (c^2 I - (A + A_hat)^2)^{1/2},    c = 1 + 1/r^2.

It satisfies ``Z_hat W_hat = W_hat Z_hat = I/r^2``, ``|Z_hat| = |W_hat| = 1``
and ``(Z_hat + W_hat^*)/c`` is unitary. On the cross ``c = 1`` and ``U`` is
a common polar unitary for ``Z`` and ``W^*``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .calculus import compression_top_left, eval_on_pair
from .domains import HyperbolaPair, membership
from .errors import ConstructionFailure, InvalidInputError, MembershipError, NotPSDError
from .laurent import HyperbolaFunction, random_hyperbola_function

ITEM_TOL = 1e-8
ASHAT_CROSSCHECK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DilationResult:
    Z_hat: np.ndarray
    W_hat: np.ndarray
    U_big: np.ndarray
    H: np.ndarray
    A: np.ndarray
    A_hat: np.ndarray
    c: float
    pair: HyperbolaPair
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.pair.dim

    @property
    def r(self):
        return self.pair.r

    @property
    def dilated_pair(self):
        return HyperbolaPair(self.Z_hat, self.W_hat, self.pair.r)


def _assemble(h, U, A, A_hat, c, clamp_tol, diagnostics):
    n = h.dim
    B = A + A_hat
    radicand = nk.hermitian_part(c * c * nk.identity(n) - B @ B)
    diagnostics["radicand_min_eig"] = float(np.linalg.eigvalsh(radicand)[0])
    try:
        S = nk.psd_sqrt(radicand, clamp_tol=clamp_tol)
    except NotPSDError as exc:
        raise ConstructionFailure(f"radicand c^2 I - (A + A_hat)^2 is not PSD: {exc}") from exc
    H = U @ S
    zero = np.zeros((n, n), dtype=np.complex128)
    Z_hat = np.block([[h.Z, H], [zero, nk.adjoint(h.W)]])
    W_hat = np.block([[h.W, -nk.adjoint(H)], [zero, nk.adjoint(h.Z)]])
    U_big = (Z_hat + nk.adjoint(W_hat)) / c
    return DilationResult(Z_hat, W_hat, U_big, H, A, A_hat, c, h, diagnostics)


def build_dilation(h, clamp_tol=nk.CLAMP_TOL, tol=1e-10, closed=False):
    """Dilate a pair on the quantum hyperbola of finite type r.

    ``closed=True`` also accepts boundary pairs (``|Z| = 1`` or ``|W| = 1``),
    where the radicand loses rank.
    """
    if h.is_cross:
        raise InvalidInputError("use build_cross_dilation for r = inf")
    rep = membership(h, tol=tol, closed=closed)
    if not rep.ok:
        raise MembershipError(f"pair fails membership: margins={rep.margins}, residuals={rep.residuals}")
    r2 = h.r**2
    U, A = nk.polar(h.Z)
    A_hat = nk.hermitian_part(nk.inverse(A) / r2)
    A_hat_check = nk.psd_sqrt(h.W @ nk.adjoint(h.W))
    diagnostics = {
        "a_hat_discrepancy": float(np.linalg.norm(A_hat - A_hat_check, 2)),
        "polar_residual": float(np.linalg.norm(U @ A - h.Z, 2)),
    }
    diagnostics["a_hat_crosscheck_ok"] = diagnostics["a_hat_discrepancy"] <= ASHAT_CROSSCHECK_TOL
    c = 1.0 + 1.0 / r2
    return _assemble(h, U, A, A_hat, c, clamp_tol, diagnostics)


def build_cross_dilation(h, clamp_tol=nk.CLAMP_TOL, tol=1e-10):
    """Dilate a pair on the quantum cross (the r -> inf limit, c = 1)."""
    if not h.is_cross:
        raise InvalidInputError("build_cross_dilation needs r = inf")
    rep = membership(h, tol=tol)
    if not rep.ok:
        raise MembershipError(f"pair fails membership: margins={rep.margins}, residuals={rep.residuals}")
    U = nk.common_polar_unitary(h.Z, h.W, tol=tol)
    A = nk.modulus(h.Z)
    A_hat = nk.modulus(nk.adjoint(h.W))
    diagnostics = {
        "polar_residual": float(np.linalg.norm(U @ A - h.Z, 2)),
        "polar_residual_w": float(np.linalg.norm(A_hat @ nk.adjoint(U) - h.W, 2)),
        "residual_convention": "identity-on-residual",
    }
    return _assemble(h, U, A, A_hat, 1.0, clamp_tol, diagnostics)


def dilate(h, **kwargs):
    return build_cross_dilation(h, **kwargs) if h.is_cross else build_dilation(h, **kwargs)


def default_probes(seed=0, count=20, max_deg=12):
    """``count`` Gaussian probe functions of degree <= max_deg, plus ``z + w`` and a constant."""
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(count):
        dp, dm = (int(d) for d in rng.integers(0, max_deg + 1, size=2))
        probes.append(random_hyperbola_function(dp, dm, int(rng.integers(2**31))))
    probes.append(HyperbolaFunction([1], 0, [1]))
    probes.append(HyperbolaFunction.constant(1.0))
    return probes


@dataclass(frozen=True)
class VerificationReport:
    residuals: dict
    passed: dict
    tol: float

    @property
    def ok(self):
        return all(self.passed.values())


def verify_dilation(d, probes=None, tol=ITEM_TOL):
    """Residuals for the five dilation properties.

    ``item1`` = ``max(||Z_hat| - 1|, ||W_hat| - 1|)``; ``item2`` = product
    defects; ``item3`` = directed distance from the spectra of ``Z_hat`` and
    ``W_hat`` to those of the diagonal blocks; ``item4`` = ``|U^*U - I|``;
    ``item5`` = ``max_f |f(Z,W)| - |f(Z_hat,W_hat)|`` (compression defect).
    Item 3 is judged against ``max(tol, 1e-7 * dim * |M|)`` since spectra of
    non-normal matrices are only that well determined.
    """
    if probes is None:
        probes = default_probes()
    h = d.pair
    n2 = 2 * h.dim
    I2 = nk.identity(n2)
    q = h.product

    item1 = max(abs(nk.operator_norm(d.Z_hat) - 1.0), abs(nk.operator_norm(d.W_hat) - 1.0))
    item2 = max(
        np.linalg.norm(d.Z_hat @ d.W_hat - q * I2, 2),
        np.linalg.norm(d.W_hat @ d.Z_hat - q * I2, 2),
    )
    spec_z = np.concatenate([nk.eigenvalues(h.Z), nk.eigenvalues(nk.adjoint(h.W))])
    spec_w = np.concatenate([nk.eigenvalues(h.W), nk.eigenvalues(nk.adjoint(h.Z))])
    item3 = max(
        nk.directed_distance(nk.eigenvalues(d.Z_hat), spec_z),
        nk.directed_distance(nk.eigenvalues(d.W_hat), spec_w),
    )
    item4 = float(np.linalg.norm(nk.adjoint(d.U_big) @ d.U_big - I2, 2))

    hat = d.dilated_pair
    item5 = -np.inf
    compression = 0.0
    for f in probes:
        small = eval_on_pair(f, h, check=False)
        big = eval_on_pair(f, hat, check=False)
        item5 = max(item5, nk.operator_norm(small) - nk.operator_norm(big))
        compression = max(compression, float(np.linalg.norm(compression_top_left(big, h.dim) - small, 2)))

    tol3 = max(tol, nk.eigen_match_tolerance(d.Z_hat), nk.eigen_match_tolerance(d.W_hat))
    residuals = {
        "item1": float(item1),
        "item2": float(item2),
        "item3": float(item3),
        "item4": item4,
        "item5": float(item5),
        "compression": compression,
    }
    passed = {
        "item1": item1 <= tol,
        "item2": item2 <= tol,
        "item3": item3 <= tol3,
        "item4": item4 <= tol,
        "item5": item5 <= tol,
        "compression": compression <= tol,
    }
    return VerificationReport(residuals, passed, tol)
