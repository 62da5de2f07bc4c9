"""Lower-bound witnesses for the spectral constant of the quantum annulus.

The objective is ``|g(X)| / sup_{A_r} |g|`` over Laurent polynomials ``g``
and operators ``X`` with ``|X|, |X^-1| < r``. Any value it reaches is a
lower bound; nothing here certifies optimality.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .calculus import eval_on_operator, eval_on_pair
from .domains import DEFAULT_MARGIN, AnnulusOperator, HyperbolaPair, parse_r
from .errors import InvalidInputError
from .estimate import CITED_UPPER, bound_constant, trial_seed
from .laurent import (
    DEFAULT_GRID,
    HyperbolaFunction,
    LaurentPoly,
    annulus_sup_norm,
    hyperbola_sup_norm,
    is_infinite,
    random_laurent,
)

SEARCH_GRID = 256


def ratio(g, a, grid=DEFAULT_GRID):
    """``|g(X)| / sup |g|`` for an annulus operator ``a``; the sup is the sampled grid maximum."""
    if g.is_zero():
        raise InvalidInputError("ratio of the zero function is undefined")
    return nk.operator_norm(eval_on_operator(g, a.X)) / annulus_sup_norm(g, a.r, grid).grid_max


def cross_ratio(hf, h, grid=DEFAULT_GRID):
    den = hyperbola_sup_norm(hf, h.r, grid).grid_max
    if den == 0:
        raise InvalidInputError("ratio of the zero function is undefined")
    return nk.operator_norm(eval_on_pair(hf, h)) / den


@dataclass
class Witness:
    """An operator and a function together with the ratio they achieve.

    Annulus witnesses carry ``X`` and ``g``; cross witnesses carry ``Z``,
    ``W`` and ``hf``.
    """

    r: float
    ratio: float
    seed: int = None
    iterations: int = 0
    X: np.ndarray = None
    g: LaurentPoly = None
    Z: np.ndarray = None
    W: np.ndarray = None
    hf: HyperbolaFunction = None
    margin: float = DEFAULT_MARGIN
    grid: int = DEFAULT_GRID
    meta: dict = field(default_factory=dict)

    @property
    def is_cross(self):
        return self.hf is not None

    def recompute(self):
        if self.is_cross:
            return cross_ratio(self.hf, HyperbolaPair(self.Z, self.W, self.r), self.grid)
        return ratio(self.g, AnnulusOperator(self.X, self.r, self.margin), self.grid)

    def findings(self, slack=1e-9):
        """Problems with this witness: a stale ratio, or a ratio above a known upper bound."""
        out = []
        again = self.recompute()
        if abs(again - self.ratio) > slack:
            out.append({"kind": "stale-ratio", "stored": self.ratio, "recomputed": again})
        if self.is_cross:
            cap = 2.0
        else:
            cap = min(bound_constant(self.r), CITED_UPPER)
            cap *= annulus_sup_norm(self.g, self.r, self.grid).certified_upper / annulus_sup_norm(
                self.g, self.r, self.grid
            ).grid_max
        if self.ratio > cap + slack:
            out.append({"kind": "exceeds-upper-bound", "ratio": self.ratio, "cap": cap})
        return out

    def to_dict(self):
        def cm(M):
            return None if M is None else [[[z.real, z.imag] for z in row] for row in np.asarray(M)]

        def cv(v):
            return [[z.real, z.imag] for z in np.asarray(v)]

        out = {
            "r": "inf" if is_infinite(self.r) else self.r,
            "ratio": self.ratio,
            "seed": self.seed,
            "iterations": self.iterations,
            "margin": self.margin,
            "grid": self.grid,
            "meta": self.meta,
        }
        if self.is_cross:
            out.update(Z=cm(self.Z), W=cm(self.W), f_plus=cv(self.hf.f_plus), a0=[self.hf.a0.real, self.hf.a0.imag], f_minus=cv(self.hf.f_minus))
        else:
            out.update(X=cm(self.X), lo=self.g.lo, hi=self.g.hi, coeffs=cv(self.g.coeffs))
        return out


def cross_witness(eps):
    """``Z = W = (1 - eps) N`` with ``N`` the 2x2 nilpotent and ``f = z + w``; ratio ``2 (1 - eps)``."""
    if not 0 <= eps < 1:
        raise InvalidInputError("eps must lie in [0, 1)")
    N = np.array([[0, 1], [0, 0]], dtype=np.complex128) * (1.0 - eps)
    hf = HyperbolaFunction([1], 0, [1])
    h = HyperbolaPair(N, N, math.inf)
    return Witness(math.inf, cross_ratio(hf, h), Z=N, W=N.copy(), hf=hf, meta={"eps": eps})


class _Objective:
    """Ratio evaluation on a coarse boundary grid for a fixed power range.

    Coefficients are carried in scaled form ``b_n = c_n r^|n|`` so that all
    columns of the boundary Vandermonde matrix have comparable size.
    """

    def __init__(self, r, lo, hi, grid):
        self.powers = np.arange(lo, hi + 1)
        self.scale = float(r) ** (-np.abs(self.powers))
        theta = 2.0 * np.pi * np.arange(grid) / grid
        pts = np.concatenate([r * np.exp(1j * theta), np.exp(1j * theta) / r])
        self.V = (pts[:, None] ** self.powers[None, :]) * self.scale
        self.lo = lo
        self.evals = 0

    def power_stack(self, X):
        n = X.shape[0]
        P = np.empty((self.powers.size, n, n), dtype=np.complex128)
        zero = -self.lo
        P[zero] = np.eye(n)
        for k in range(zero + 1, self.powers.size):
            P[k] = P[k - 1] @ X
        if self.lo < 0:
            Y = np.linalg.inv(X)
            for k in range(zero - 1, -1, -1):
                P[k] = P[k + 1] @ Y
        return P

    def evaluate(self, b, P):
        """Returns ``(ratio, u, v)`` with ``(u, v)`` the leading singular pair of ``g(X)``."""
        self.evals += 1
        M = np.tensordot(b * self.scale, P, axes=1)
        U, s, Vh = np.linalg.svd(M)
        den = np.abs(self.V @ b).max()
        return s[0] / den, U[:, 0], Vh[0].conj()

    def coefficient_step(self, P, u, v, iters):
        """Maximize ``Re(u^* g(X) v)`` over ``sup |g| <= 1`` by Lawson reweighting.

        The linear functional ``b -> u^* g(X) v`` is the gradient of the top
        singular value, so the optimum is an ascent step for the ratio.
        """
        a = np.einsum("i,kij,j->k", u.conj(), P, v) * self.scale
        w = np.full(self.V.shape[0], 1.0 / self.V.shape[0])
        best, best_val = None, -np.inf
        ridge = 1e-14 * np.abs(self.V).max() ** 2 * np.eye(self.V.shape[1])
        VH = self.V.conj().T
        for _ in range(iters):
            self.evals += 1
            M = (VH * w) @ self.V + ridge
            y = np.linalg.solve(M, a.conj())
            b = y / (a @ y)
            err = np.abs(self.V @ b)
            val = 1.0 / err.max()
            if val > best_val:
                best, best_val = b * val, val
            w = w * err
            w /= w.sum()
        return best

    def operator_gradient(self, b, X, P, u, v):
        """Gradient of ``sigma_max(g(X))`` with respect to ``X``.

        For ``X^n`` the derivative contributes ``sum_{j+k=n-1} (X^j)^* u (X^k v)^*``;
        for ``X^-m`` it contributes ``-sum_{p+q=m+1} (X^-p)^* u (X^-q v)^*``.
        Both sums are Hankel-structured and collapse to ``L @ C @ R^*``.
        """
        c = np.conj(b * self.scale)
        zero = -self.lo
        hi = self.powers[-1]
        G = np.zeros_like(X)
        if hi > 0:
            L = np.einsum("kji,j->ik", P[zero:zero + hi].conj(), u)
            R = np.einsum("kij,j->ik", P[zero:zero + hi], v)
            jk = np.add.outer(np.arange(hi), np.arange(hi)) + 1
            C = np.where(jk <= hi, c[np.minimum(jk, hi) + zero], 0)
            G += L @ C @ R.conj().T
        m = zero
        if m > 0:
            neg = P[zero - np.arange(1, m + 1)]
            L = np.einsum("kji,j->ik", neg.conj(), u)
            R = np.einsum("kij,j->ik", neg, v)
            pq = np.add.outer(np.arange(1, m + 1), np.arange(1, m + 1)) - 1
            C = np.where(pq <= m, c[zero - np.minimum(pq, m)], 0)
            G -= L @ C @ R.conj().T
        return G


def project_annulus(X, r, margin):
    """Clamp singular values of ``X`` into ``[1/(r - margin), r - margin]``."""
    U, s, Vh = np.linalg.svd(X)
    hi = r - margin
    s = np.clip(s, 1.0 / hi, hi)
    return (U * s) @ Vh


def _random_operator(dim, r, margin, rng):
    hi = r - margin
    s = np.exp(rng.uniform(-np.log(hi), np.log(hi), size=dim))
    return (nk.haar_unitary(dim, rng) * s) @ nk.adjoint(nk.haar_unitary(dim, rng))


def _ascend(r, dim, deg, budget, margin, search_grid, s, lawson_iters=40):
    rng = np.random.default_rng(s)
    obj = _Objective(r, -deg, deg, search_grid)
    X = _random_operator(dim, r, margin, rng)
    b = random_laurent(-deg, deg, 1.0, int(rng.integers(2**31))).coeffs.copy()
    P = obj.power_stack(X)
    state = obj.evaluate(b, P)
    best = (state[0], X, b)
    eta = 0.1
    iterations = 0
    stall = 0
    while obj.evals < budget:
        iterations += 1
        improved = False
        if deg > 0:
            b_new = obj.coefficient_step(P, state[1], state[2], lawson_iters)
            trial = obj.evaluate(b_new, P)
            if trial[0] > state[0] * (1 + 1e-12):
                b, state = b_new, trial
                improved = True
        for _ in range(8):
            if obj.evals >= budget:
                break
            G = obj.operator_gradient(b, X, P, state[1], state[2])
            nG = np.linalg.norm(G)
            if nG == 0:
                break
            X_new = project_annulus(X + eta * np.linalg.norm(X) * G / nG, r, margin)
            P_new = obj.power_stack(X_new)
            trial = obj.evaluate(b, P_new)
            if trial[0] > state[0]:
                X, P, state = X_new, P_new, trial
                eta = min(eta * 1.5, 1.0)
                improved = True
            else:
                eta = max(eta * 0.5, 1e-12)
        if state[0] > best[0]:
            best = (state[0], X, b)
        stall = 0 if improved else stall + 1
        if stall >= 2 and obj.evals < budget:
            # kick from the best point found so far
            kick = 0.1 * (rng.standard_normal(X.shape) + 1j * rng.standard_normal(X.shape))
            X = project_annulus(best[1] + kick * np.linalg.norm(best[1]), r, margin)
            b = best[2]
            P = obj.power_stack(X)
            state = obj.evaluate(b, P)
            eta, stall = 0.1, 0
    return (best[0], best[1], best[2] * obj.scale), iterations


def _finalize(r, deg, margin, grid, s, best, iterations):
    _, X, c = best
    g = LaurentPoly(-deg, deg, c)
    a = AnnulusOperator(project_annulus(X, r, margin), r, margin)
    return Witness(r, ratio(g, a, grid), seed=s, iterations=iterations, X=a.X, g=g, margin=margin, grid=grid)


def optimize_lower_bound(r, dim=4, deg=10, budget=100_000, restarts=8, seed=0, margin=DEFAULT_MARGIN,
                         grid=DEFAULT_GRID, search_grid=SEARCH_GRID, workers=1):
    """Alternating ascent over ``(g, X)`` with random restarts.

    Each restart alternates ascent steps on the coefficients of ``g`` (using
    the leading singular pair of ``g(X)``) with projected gradient steps on
    ``X``, keeping singular values within ``[1/(r - margin), r - margin]``.
    ``budget`` counts ratio evaluations over all restarts; restart ``k``
    uses dimension ``2 + k mod (dim - 1)`` (1 if ``dim == 1``). The stored
    ratio is recomputed on the full ``grid`` with peak refinement.
    """
    r = parse_r(r)
    if is_infinite(r):
        raise InvalidInputError("the annulus search needs finite r")
    if budget < 1 or restarts < 1:
        raise InvalidInputError("budget and restarts must be positive")
    dim = nk.check_dim(dim)
    if deg < 0:
        raise InvalidInputError("deg must be non-negative")
    per = max(1, budget // restarts)

    def run(k):
        s = trial_seed(seed, k)
        n = 1 if dim == 1 else 2 + k % (dim - 1)
        best, iterations = _ascend(r, n, deg, per, margin, search_grid, s)
        w = _finalize(r, deg, margin, grid, s, best, iterations)
        w.meta.update(restart=k, dim=n, budget=per)
        return w

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            witnesses = list(pool.map(run, range(restarts)))
    else:
        witnesses = [run(k) for k in range(restarts)]
    return max(witnesses, key=lambda w: (w.ratio, -w.meta["restart"]))


def sweep(r_values, dim=4, deg=10, budget=100_000, seed=0, restarts=8, workers=1):
    """One search per radius; rows ``{r, C_r, best_ratio, gap, witness}``."""
    rows = []
    for r in r_values:
        r = parse_r(r)
        w = optimize_lower_bound(r, dim, deg, budget, restarts, seed, workers=workers)
        c = bound_constant(r)
        rows.append({"r": r, "C_r": c, "best_ratio": w.ratio, "gap": c - w.ratio, "witness": w})
    return rows
