"""Laurent polynomials, boundary sup-norms, and the hyperbola decomposition.

A function on the annulus ``1/r < |zeta| < r`` is a :class:`LaurentPoly`.
Under ``z = zeta/r``, ``w = 1/(r zeta)`` the same function on the
conservative hyperbola splits as ``f(z, w) = f_plus(z) z + a0 + w f_minus(w)``
and is stored as a :class:`HyperbolaFunction`.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError, UnsupportedError

MIN_LO = -32
MAX_HI = 32
DEFAULT_GRID = 4096
MIN_GRID = 64


def _coeff_array(values):
    arr = np.atleast_1d(np.asarray(values, dtype=np.complex128))
    if arr.ndim != 1:
        raise InvalidInputError("coefficients must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("coefficients must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def is_infinite(r):
    return r is None or math.isinf(float(r))


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """``sum_{n=lo}^{hi} c_n zeta^n``; ``coeffs[k]`` holds ``c_{lo+k}``."""

    lo: int
    hi: int
    coeffs: np.ndarray

    def __init__(self, lo, hi, coeffs):
        lo, hi = int(lo), int(hi)
        if lo > 0 or hi < 0:
            raise InvalidInputError(f"need lo <= 0 <= hi, got lo={lo}, hi={hi}")
        if lo < MIN_LO or hi > MAX_HI:
            raise InvalidInputError(f"degree range [{lo}, {hi}] exceeds caps [{MIN_LO}, {MAX_HI}]")
        coeffs = _coeff_array(coeffs)
        if coeffs.size != hi - lo + 1:
            raise InvalidInputError(f"expected {hi - lo + 1} coefficients, got {coeffs.size}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_dict(cls, terms):
        """Build from ``{power: coefficient}``; missing powers are zero."""
        lo = min(min(terms, default=0), 0)
        hi = max(max(terms, default=0), 0)
        c = np.zeros(hi - lo + 1, dtype=np.complex128)
        for n, v in terms.items():
            c[n - lo] += v
        return cls(lo, hi, c)

    @classmethod
    def constant(cls, a0):
        return cls(0, 0, [a0])

    def coeff(self, n):
        if self.lo <= n <= self.hi:
            return complex(self.coeffs[n - self.lo])
        return 0j

    @property
    def positive(self):
        """Coefficients ``c_0, c_1, ..., c_hi``."""
        return self.coeffs[-self.lo:]

    @property
    def negative(self):
        """Coefficients ``c_{-1}, c_{-2}, ..., c_lo``."""
        return self.coeffs[: -self.lo][::-1]

    def is_zero(self):
        return not np.any(self.coeffs)

    def scaled(self, lam):
        return LaurentPoly(self.lo, self.hi, lam * self.coeffs)

    def powers(self):
        return np.arange(self.lo, self.hi + 1)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        terms = ", ".join(f"{n}: {c:.6g}" for n, c in zip(self.powers(), self.coeffs) if c != 0)
        return f"LaurentPoly({{{terms}}})"


@dataclass(frozen=True, eq=False)
class HyperbolaFunction:
    """``f(z, w) = f_plus(z) z + a0 + w f_minus(w)`` with ascending coefficient arrays."""

    f_plus: np.ndarray
    a0: complex
    f_minus: np.ndarray

    def __init__(self, f_plus, a0, f_minus):
        a0 = complex(a0)
        if not np.isfinite(a0):
            raise InvalidInputError("a0 must be finite")
        object.__setattr__(self, "f_plus", _coeff_array(f_plus))
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "f_minus", _coeff_array(f_minus))

    @classmethod
    def constant(cls, a0):
        return cls([0], a0, [0])

    def z_part(self):
        """Coefficients of ``f_plus(z) z + a0`` as a polynomial in ``z``."""
        return np.concatenate([[self.a0], self.f_plus])

    def w_part(self):
        """Coefficients of ``w f_minus(w) + a0`` as a polynomial in ``w``."""
        return np.concatenate([[self.a0], self.f_minus])

    def __call__(self, z, w):
        return horner(self.f_plus, z) * z + self.a0 + w * horner(self.f_minus, w)

    def __eq__(self, other):
        if not isinstance(other, HyperbolaFunction):
            return NotImplemented
        return (
            np.array_equal(self.f_plus, other.f_plus)
            and self.a0 == other.a0
            and np.array_equal(self.f_minus, other.f_minus)
        )


@dataclass(frozen=True)
class NormEstimate:
    grid_max: float
    certified_upper: float
    grid_points: int

    @property
    def pad(self):
        return self.certified_upper - self.grid_max


def horner(coeffs, x):
    """Evaluate ``sum_k coeffs[k] x^k``; works elementwise on arrays."""
    acc = np.zeros_like(np.asarray(x, dtype=np.complex128))
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def eval_scalar(g, zeta):
    """Value of ``g`` at ``zeta`` (scalar or array)."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    if g.lo < 0 and np.any(zeta == 0):
        raise InvalidInputError("cannot evaluate negative powers at zero")
    value = horner(g.positive, zeta)
    if g.lo < 0:
        inv = 1.0 / zeta
        value = value + inv * horner(g.negative, inv)
    return value[()] if value.ndim == 0 else value


def _circle_max(func, rho, grid, refine):
    theta = 2.0 * np.pi * np.arange(grid) / grid
    vals = np.abs(func(rho * np.exp(1j * theta)))
    best = float(vals.max())
    if refine and best > 0:
        h = 2.0 * np.pi / grid
        is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
        peaks = np.flatnonzero(is_peak)
        for k in peaks[np.argsort(vals[peaks])[::-1][:4]]:
            res = minimize_scalar(
                lambda t: -abs(complex(func(rho * np.exp(1j * t)))),
                bounds=(theta[k] - h, theta[k] + h),
                method="bounded",
                options={"xatol": 1e-13},
            )
            best = max(best, float(-res.fun))
    return best


def _derivative_bound(powers, coeffs, rho):
    """``sum |n| |c_n| rho^(n-1)``, bounding ``|g'|`` (the arc-length Lipschitz constant) on ``|zeta| = rho``."""
    n = np.asarray(powers, dtype=float)
    mask = n != 0
    return float(np.sum(np.abs(n[mask]) * np.abs(coeffs[mask]) * rho ** (n[mask] - 1.0)))


def _check_grid(grid):
    if int(grid) != grid or grid < MIN_GRID:
        raise InvalidInputError(f"grid must be an integer >= {MIN_GRID}")
    return int(grid)


def annulus_sup_norm(g, r, grid=DEFAULT_GRID, refine=True):
    """Sup of ``|g|`` over the closed annulus, sampled on both boundary circles.

    ``grid_max`` is the best sampled value (locally refined around the top
    peaks), ``certified_upper`` adds half an arc spacing times a Lipschitz
    bound along each circle.
    """
    grid = _check_grid(grid)
    if not r > 1 or is_infinite(r):
        raise InvalidInputError("r must be a finite real > 1")
    grid_max = 0.0
    upper = 0.0
    for rho in (r, 1.0 / r):
        m = _circle_max(lambda x: eval_scalar(g, x), rho, grid, refine)
        arc = 2.0 * np.pi * rho / grid
        pad = 0.5 * arc * _derivative_bound(g.powers(), g.coeffs, rho)
        grid_max = max(grid_max, m)
        upper = max(upper, m + pad)
    return NormEstimate(grid_max, upper, 2 * grid)


def disk_sup_norm(p, grid=DEFAULT_GRID, refine=True):
    """Sup of ``|p|`` over the closed unit disk, ``p`` given by ascending coefficients."""
    grid = _check_grid(grid)
    if isinstance(p, LaurentPoly):
        if p.lo < 0:
            raise InvalidInputError("disk_sup_norm needs a polynomial (no negative powers)")
        p = p.positive
    p = _coeff_array(p)
    m = _circle_max(lambda x: horner(p, x), 1.0, grid, refine)
    pad = 0.5 * (2.0 * np.pi / grid) * _derivative_bound(np.arange(p.size), p, 1.0)
    return NormEstimate(m, m + pad, grid)


def to_hyperbola(g, r):
    if not r > 1 or is_infinite(r):
        raise InvalidInputError("r must be a finite real > 1")
    n_pos = np.arange(1, g.hi + 1)
    n_neg = np.arange(1, -g.lo + 1)
    f_plus = g.positive[1:] * float(r) ** n_pos if g.hi > 0 else [0]
    f_minus = g.negative * float(r) ** n_neg if g.lo < 0 else [0]
    return HyperbolaFunction(f_plus, g.coeff(0), f_minus)


def _trim(c):
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:0]


def to_annulus(hf, r):
    if is_infinite(r):
        raise UnsupportedError("the cross has no annulus model (r = inf)")
    if not r > 1:
        raise InvalidInputError("r must be a finite real > 1")
    pos = _trim(hf.f_plus)
    neg = _trim(hf.f_minus)
    pos = pos / float(r) ** np.arange(1, pos.size + 1)
    neg = neg / float(r) ** np.arange(1, neg.size + 1)
    coeffs = np.concatenate([neg[::-1], [hf.a0], pos])
    return LaurentPoly(-neg.size, pos.size, coeffs)


def hyperbola_sup_norm(hf, r, grid=DEFAULT_GRID, refine=True):
    """Sup of ``|f|`` on the conservative hyperbola of type r, or on the cross when r is inf.

    The cross is the union of the disks ``{(z, 0)}`` and ``{(0, w)}``, so its
    norm is the larger of the two one-variable disk norms.
    """
    if not is_infinite(r):
        return annulus_sup_norm(to_annulus(hf, r), r, grid, refine)
    a = disk_sup_norm(hf.z_part(), grid, refine)
    b = disk_sup_norm(hf.w_part(), grid, refine)
    return NormEstimate(max(a.grid_max, b.grid_max), max(a.certified_upper, b.certified_upper), 2 * a.grid_points)


def cauchy_constants(r):
    """Constants bounding the parts of a hyperbola function by its sup-norm.

    Returns ``(k1, k2)`` with ``|f_plus z + a0|_D <= k1 |f|`` and
    ``|f_plus|_D <= k2 |f|`` (likewise for the ``w`` side). The limits at
    r = inf are ``(1, 2)``; the second is sharp on the cross.
    """
    if is_infinite(r):
        return 1.0, 2.0
    if not r > 1:
        raise InvalidInputError("r must exceed 1")
    r2 = float(r) ** 2
    return r2 / (r2 - 1.0), (2.0 * r2 - 1.0) / (r2 - 1.0)


def _complex_gaussian(rng, size):
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def random_laurent(lo, hi, r, seed):
    """Gaussian Laurent polynomial with ``c_n`` damped by ``r^-|n|``."""
    if lo > 0 or hi < 0:
        raise InvalidInputError("need lo <= 0 <= hi")
    rng = np.random.default_rng(seed)
    n = np.arange(lo, hi + 1)
    return LaurentPoly(lo, hi, _complex_gaussian(rng, n.size) * float(r) ** (-np.abs(n)))


def random_hyperbola_function(deg_plus, deg_minus, seed):
    """Gaussian ``(f_plus, a0, f_minus)`` with ``f_plus z`` of degree ``deg_plus``.

    For finite r this has the same law as ``to_hyperbola(random_laurent(-deg_minus, deg_plus, r, seed), r)``.
    """
    rng = np.random.default_rng(seed)
    fp = _complex_gaussian(rng, deg_plus) if deg_plus else [0]
    a0 = _complex_gaussian(rng, 1)[0]
    fm = _complex_gaussian(rng, deg_minus) if deg_minus else [0]
    return HyperbolaFunction(fp, a0, fm)
