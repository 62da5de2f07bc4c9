import math

import numpy as np
import pytest

from qannulus.calculus import eval_on_pair
from qannulus.dilation import build_cross_dilation, dilate
from qannulus.domains import HyperbolaPair, sample_quantum_cross, sample_quantum_hyperbola
from qannulus.errors import InvalidInputError
from qannulus.estimate import (
    CITED_UPPER,
    asymptotic_check,
    bound_constant,
    crossover_radius,
    identity_residual,
    identity_sides,
    known_bounds,
    trial_seed,
    verify_estimate,
)
from qannulus.laurent import HyperbolaFunction, random_hyperbola_function

from conftest import opnorm


def bisect(fn, lo, hi, steps=200):
    for _ in range(steps):
        mid = (lo + hi) / 2
        if (fn(lo) < 0) == (fn(mid) < 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestBoundConstant:
    def test_values(self):
        assert bound_constant(math.inf) == 2.0
        assert bound_constant("inf") == 2.0
        assert bound_constant(2) == pytest.approx(46 / 15, rel=1e-15)
        assert bound_constant(10) == pytest.approx(2 + 400 / 9999, rel=1e-15)
        assert round(bound_constant(10), 6) == 2.040004

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            bound_constant(1.0)

    def test_decreasing_to_two(self):
        rs = np.geomspace(1.01, 1e4, 400)
        cs = [bound_constant(r) for r in rs]
        assert all(a > b for a, b in zip(cs, cs[1:]))
        assert cs[-1] - 2 < 1e-7

    def test_intermediate_algebra(self):
        # 2 (r^2/(r^2+1)) [r^2/(r^2-1) + (2r^2-1)/(r^4-r^2)] = C(r)
        for r in [1.2, 2.0, 3.7, 10.0]:
            r2 = r * r
            lhs = 2 * r2 / (r2 + 1) * (r2 / (r2 - 1) + (2 * r2 - 1) / (r2 * r2 - r2))
            assert lhs == pytest.approx(bound_constant(r), rel=1e-14)


class TestKnownBounds:
    def test_small_r_uses_cited(self):
        kb = known_bounds(2)
        assert kb["upper"] == pytest.approx(CITED_UPPER) and kb["upper_source"].startswith("cited")
        assert kb["lower"] == 2.0

    def test_large_r_uses_estimate(self):
        kb = known_bounds(10)
        assert kb["upper"] == pytest.approx(2.040004, abs=1e-6) and kb["upper_source"] == "estimate C(r)"

    def test_crossover(self):
        oracle = math.sqrt(bisect(lambda x: x * x - 4 / (math.sqrt(2) - 1) * x - 1, 1.0, 100.0))
        assert crossover_radius() == pytest.approx(oracle, abs=1e-10)
        assert crossover_radius() == pytest.approx(3.1240, abs=1e-3)


class TestAsymptotic:
    def test_rows(self):
        rows = asymptotic_check([2, 10])
        assert rows[0][1] == pytest.approx(16 / 15) and rows[0][2] == pytest.approx(1.075)
        assert rows[1][1] == pytest.approx(0.04, abs=1e-5) and rows[1][2] == pytest.approx(0.043)
        assert all(row[3] for row in rows)

    def test_leading_term(self):
        r = 1e4
        assert (bound_constant(r) - 2) * r * r / 4 == pytest.approx(1.0, abs=1e-7)

    def test_rejects_small_r(self):
        with pytest.raises(InvalidInputError):
            asymptotic_check([1.9])


class TestIdentity:
    def test_nilpotent_instance(self):
        N = np.array([[0, 1], [0, 0]])
        d = build_cross_dilation(HyperbolaPair(N, N, math.inf))
        lhs, rhs = identity_sides(HyperbolaFunction([1], 0, [1]), d)
        assert opnorm(lhs - rhs) <= 1e-12
        assert np.allclose(lhs[:2, :2], [[0, 0], [2, 0]], atol=1e-12)
        assert np.allclose(rhs[:2, :2], [[0, 0], [2, 0]], atol=1e-12)

    @pytest.mark.parametrize("r", [1.5, 2.0, math.inf])
    @pytest.mark.parametrize("seed", range(5))
    def test_constant_function(self, r, seed):
        h = sample_quantum_cross(3, seed=seed) if math.isinf(r) else sample_quantum_hyperbola(3, r, seed=seed)
        assert identity_residual(HyperbolaFunction.constant(1.3 - 0.2j), dilate(h)) <= 1e-10

    @pytest.mark.parametrize("r", [1.05, 2.0, 10.0, math.inf])
    @pytest.mark.parametrize("seed", range(10))
    def test_random(self, r, seed):
        h = sample_quantum_cross(4, seed=seed) if math.isinf(r) else sample_quantum_hyperbola(4, r, seed=seed)
        hf = random_hyperbola_function(8, 8, seed)
        assert identity_residual(hf, dilate(h)) <= 1e-9

    def test_fails_without_dilation(self):
        # the identity needs a unitary U; on the undilated pair it is false
        h = sample_quantum_hyperbola(2, 2.0, seed=0)
        d = dilate(h)
        fake = type(d)(d.Z_hat, d.W_hat, np.eye(4), d.H, d.A, d.A_hat, d.c, d.pair)
        assert identity_residual(HyperbolaFunction([1], 0, [1]), fake) > 1e-3


class TestVerifyEstimate:
    def test_constant_ratio_is_one(self):
        h = sample_quantum_hyperbola(3, 2.0, seed=0)
        f = HyperbolaFunction.constant(-2.5)
        assert opnorm(eval_on_pair(f, h)) / 2.5 == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("r", [1.5, 2.0, math.inf])
    def test_small_run(self, r):
        rep = verify_estimate(r, dim=4, deg=8, trials=20, seed=3, grid=1024)
        assert rep.ok and rep.trials == 20
        assert rep.max_ratio <= rep.C_r * 1.01
        assert rep.max_identity_residual <= 1e-9
        assert rep.witness_seed in [trial_seed(3, i) for i in range(20)]

    def test_workers_agree(self):
        a = verify_estimate(2.0, dim=3, deg=6, trials=12, seed=1, grid=512)
        b = verify_estimate(2.0, dim=3, deg=6, trials=12, seed=1, grid=512, workers=4)
        assert a.to_dict() == b.to_dict()

    def test_report_dict(self):
        d = verify_estimate(math.inf, dim=2, deg=3, trials=3, grid=256).to_dict()
        assert d["r"] == "inf" and d["C_r"] == 2.0 and d["violations"] == []

    def test_trial_seed(self):
        assert trial_seed(0, 1) == trial_seed(0, 1)
        assert trial_seed(0, 1) != trial_seed(1, 0)
