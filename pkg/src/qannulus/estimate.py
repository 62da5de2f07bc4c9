"""The norm estimate ``|f(Z, W)| <= C(r) |f|`` and randomized checks of it.

``C(r) = 2 (1 + 2 r^2 / (r^4 - 1))``, with ``C(inf) = 2`` on the cross.
The proof runs through an exact operator identity on the dilated pair;
:func:`identity_residual` measures how well it holds in floating point.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import numkernel as nk
from .calculus import eval_on_pair, eval_parts
from .dilation import dilate
from .domains import parse_r, sample_quantum_cross, sample_quantum_hyperbola
from .errors import InvalidInputError
from .laurent import DEFAULT_GRID, hyperbola_sup_norm, is_infinite, random_hyperbola_function

CITED_UPPER = 1.0 + math.sqrt(2.0)
CITED_LOWER = 2.0
ASYMPTOTIC_CONSTANT = 4.3


def bound_constant(r):
    r = parse_r(r)
    if is_infinite(r):
        return 2.0
    r2 = r * r
    return 2.0 * (1.0 + 2.0 * r2 / (r2 * r2 - 1.0))


def crossover_radius():
    """Radius where ``C(r)`` equals the cited constant ``1 + sqrt(2)``; ``C`` wins beyond it."""
    return brentq(lambda r: bound_constant(r) - CITED_UPPER, 1.0 + 1e-6, 1e3, xtol=1e-14)


def known_bounds(r):
    r = parse_r(r)
    c = bound_constant(r)
    if c < CITED_UPPER:
        upper, source = c, "estimate C(r)"
    else:
        upper, source = CITED_UPPER, "cited 1+sqrt(2)"
    return {
        "r": r,
        "lower": CITED_LOWER,
        "lower_source": "cited 2",
        "upper": upper,
        "upper_source": source,
        "C_r": c,
        "crossover_r": crossover_radius(),
    }


def identity_sides(hf, d):
    """Both sides of the operator identity on a dilated pair ``(Z, W, U)``.

    Left: ``c U f(Z,W) U^*``. Right:
    ``U (f+(Z)Z + a0) Z^* + W^* (W f-(W) + a0) U^* + (1/r^2)(U f+(Z) + f-(W) U^*)``.
    """
    Z, W, U = d.Z_hat, d.W_hat, d.U_big
    n = Z.shape[0]
    I = nk.identity(n)
    Ua = nk.adjoint(U)
    fp, fm = eval_parts(hf, Z, W)
    z_side = fp @ Z + hf.a0 * I
    w_side = W @ fm + hf.a0 * I
    f = z_side + w_side - hf.a0 * I
    lhs = d.c * U @ f @ Ua
    rhs = U @ z_side @ nk.adjoint(Z) + nk.adjoint(W) @ w_side @ Ua
    q = d.pair.product
    if q:
        rhs = rhs + q * (U @ fp + fm @ Ua)
    return lhs, rhs


def identity_residual(hf, d):
    lhs, rhs = identity_sides(hf, d)
    return float(np.linalg.norm(lhs - rhs, 2))


def trial_seed(seed, index):
    """Per-trial seed; independent of execution order."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


@dataclass
class BoundReport:
    r: float
    C_r: float
    trials: int
    max_ratio: float
    max_identity_residual: float
    witness_seed: int = None
    max_allowed: float = None
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        out = asdict(self)
        out["r"] = "inf" if is_infinite(self.r) else self.r
        return out


def _one_trial(r, dim, deg, grid, s, index):
    rng = np.random.default_rng(s)
    n = int(rng.integers(1, dim + 1))
    pair_seed, f_seed = (int(x) for x in rng.integers(2**31, size=2))
    if is_infinite(r):
        mode = "structured" if index % 2 == 0 else "general"
        h = sample_quantum_cross(max(n, 2), seed=pair_seed, mode=mode)
    else:
        h = sample_quantum_hyperbola(n, r, seed=pair_seed)
    dp, dm = (int(x) for x in rng.integers(0, deg + 1, size=2))
    hf = random_hyperbola_function(dp, dm, f_seed)
    est = hyperbola_sup_norm(hf, r, grid)
    value = nk.operator_norm(eval_on_pair(hf, h))
    ratio = value / est.grid_max
    residual = identity_residual(hf, dilate(h))
    return ratio, est.certified_upper / est.grid_max, residual


def verify_estimate(r, dim=6, deg=12, trials=500, seed=0, grid=DEFAULT_GRID, workers=1):
    """Sample pairs and functions and compare ``|f(Z,W)| / |f|`` with ``C(r)``.

    The denominator is the sampled ``grid_max`` (never above the true norm),
    and a trial counts as a violation only if the ratio exceeds
    ``C(r) * certified_upper / grid_max``.
    """
    r = parse_r(r)
    if trials < 1 or dim < 1 or deg < 0:
        raise InvalidInputError("trials and dim must be positive, deg non-negative")
    c = bound_constant(r)
    seeds = [trial_seed(seed, i) for i in range(trials)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda i: _one_trial(r, dim, deg, grid, seeds[i], i), range(trials)))
    else:
        results = [_one_trial(r, dim, deg, grid, seeds[i], i) for i in range(trials)]

    report = BoundReport(r, c, trials, -math.inf, 0.0, max_allowed=0.0)
    for i, (ratio, pad_factor, residual) in enumerate(results):
        allowed = c * pad_factor
        if ratio > report.max_ratio:
            report.max_ratio = ratio
            report.witness_seed = seeds[i]
        report.max_allowed = max(report.max_allowed, allowed)
        report.max_identity_residual = max(report.max_identity_residual, residual)
        if ratio > allowed:
            report.violations.append({"trial": i, "seed": seeds[i], "ratio": ratio, "allowed": allowed})
    return report


def asymptotic_check(r_list, constant=ASYMPTOTIC_CONSTANT):
    """Rows ``(r, C(r) - 2, constant / r^2, ok)``; valid for ``r >= 2`` only."""
    rows = []
    for r in r_list:
        r = float(r)
        if r < 2:
            raise InvalidInputError("asymptotic_check needs r >= 2")
        excess = bound_constant(r) - 2.0
        cap = constant / r**2
        rows.append((r, excess, cap, excess <= cap))
    return rows
