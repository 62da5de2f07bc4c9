"""Polynomial functional calculus on matrices and matrix pairs.

Everything is Horner evaluation; no eigendecompositions, since the
operators of interest are typically far from normal.
"""

import numpy as np

from . import numkernel as nk
from .domains import membership
from .errors import InvalidInputError, MembershipError

EVAL_TOL = 1e-9


def matrix_horner(coeffs, X):
    """``sum_k coeffs[k] X^k``."""
    n = X.shape[0]
    acc = np.zeros((n, n), dtype=np.complex128)
    I = nk.identity(n)
    for c in coeffs[::-1]:
        acc = acc @ X + c * I
    return acc


def eval_on_operator(g, X):
    """``g(X) = sum_{n>=0} c_n X^n + sum_{n>=1} c_-n X^-n``."""
    X = nk.as_cmatrix(X)
    out = matrix_horner(g.positive, X)
    if g.lo < 0:
        Xinv = nk.inverse(X)
        out = out + Xinv @ matrix_horner(g.negative, Xinv)
    return out


def eval_parts(hf, Z, W):
    """Return ``(f_plus(Z), f_minus(W))``; shared by pair evaluation and the identity check."""
    return matrix_horner(hf.f_plus, Z), matrix_horner(hf.f_minus, W)


def eval_on_pair(hf, h, tol=EVAL_TOL, check=True):
    """``f_plus(Z) Z + a0 I + W f_minus(W)`` for a pair on a closed hyperbola or the cross."""
    if check:
        rep = membership(h, tol=tol, closed=True)
        if not rep.ok:
            raise MembershipError(f"pair fails membership: margins={rep.margins}, residuals={rep.residuals}")
    fp, fm = eval_parts(hf, h.Z, h.W)
    return fp @ h.Z + hf.a0 * nk.identity(h.dim) + h.W @ fm


def compression_top_left(M, k):
    M = nk.as_cmatrix(M)
    if int(k) != k or not 1 <= k <= M.shape[0]:
        raise InvalidInputError(f"k must lie in [1, {M.shape[0]}], got {k!r}")
    return M[:k, :k].copy()
