#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from bregman_proximal_gradient import FEASIBLE_SET, BregmanKernel, DegenerateStepError, DomainError
from conftest import random_triples

import math

import numpy as np
import pytest


K = BregmanKernel.KIND

THETA_GRID = (0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 1.0)

# Found by a randomized search over triples in the positive orthant: the Itakura-Saito distance violates the uniform
# triangle-scaling inequality at exponent 0.6 (ratio about 1.63).
IS_COUNTEREXAMPLE = {"x": np.array([1.0]), "z": np.array([1.0]), "ztil": np.array([100.0]), "theta": 0.1}


def _kernel(kind, dimension=1):
    return BregmanKernel(kind, dimension)


class TestDivergence:

    def test_shannon_identical_points(self):
        assert _kernel(K.SHANNON_ENTROPY, 2).divergence([1, 1], [1, 1]) == 0.0

    def test_shannon_scalar(self):
        assert _kernel(K.SHANNON_ENTROPY).divergence([2.0], [1.0]) == pytest.approx(2 * math.log(2) - 1, rel=1e-14)

    def test_burg_scalar(self):
        assert _kernel(K.BURG_ENTROPY).divergence([2.0], [1.0]) == pytest.approx(1 - math.log(2), rel=1e-14)

    def test_euclidean_is_half_squared_distance(self):
        assert _kernel(K.SQUARED_EUCLIDEAN, 2).divergence([3.0, -1.0], [1.0, 1.0]) == pytest.approx(4.0)

    def test_shannon_allows_boundary_first_argument(self):
        assert _kernel(K.SHANNON_ENTROPY, 2).divergence([0.0, 1.0], [1.0, 1.0]) == pytest.approx(1.0)

    def test_burg_rejects_boundary_first_argument(self):
        with pytest.raises(DomainError) as info:
            _kernel(K.BURG_ENTROPY, 2).divergence([1.0, 0.0], [1.0, 1.0])

        assert info.value.coordinate == 1

    def test_shannon_rejects_boundary_second_argument(self):
        with pytest.raises(DomainError) as info:
            _kernel(K.SHANNON_ENTROPY, 3).divergence([1.0, 1.0, 1.0], [1.0, 1.0, 0.0])

        assert info.value.coordinate == 2
        assert "coordinate 2" in str(info.value)

    @pytest.mark.parametrize("kind", list(K))
    def test_nonnegative_and_zero_on_diagonal(self, kind, rng):
        kernel = _kernel(kind, 4)

        for _ in range(1000):
            x, y = rng.uniform(0.01, 10.0, size=(2, 4))

            assert kernel.divergence(x, y) >= -1e-12
            assert abs(kernel.divergence(x, x)) <= 1e-12

    @pytest.mark.parametrize("kind", list(K))
    def test_matches_definition(self, kind, rng):
        kernel = _kernel(kind, 5)

        for _ in range(100):
            x, y = rng.uniform(0.1, 5.0, size=(2, 5))
            definition = kernel.value(x) - kernel.value(y) - np.dot(kernel.grad_h(y), x - y)

            assert kernel.divergence(x, y) == pytest.approx(definition, rel=1e-9, abs=1e-10)


class TestGradH:

    def test_euclidean_is_identity(self):
        np.testing.assert_array_equal(_kernel(K.SQUARED_EUCLIDEAN, 2).grad_h([3.0, -2.0]), [3.0, -2.0])

    def test_shannon_at_one(self):
        np.testing.assert_allclose(_kernel(K.SHANNON_ENTROPY).grad_h([1.0]), [1.0])

    def test_burg(self):
        np.testing.assert_allclose(_kernel(K.BURG_ENTROPY).grad_h([2.0]), [-0.5])

    def test_burg_outside_domain(self):
        with pytest.raises(DomainError):
            _kernel(K.BURG_ENTROPY, 2).grad_h([1.0, -1.0])

    @pytest.mark.parametrize("kind", list(K))
    def test_matches_central_differences(self, kind, rng):
        kernel = _kernel(kind, 4)

        for _ in range(20):
            x = rng.uniform(0.5, 3.0, size=4)
            numeric = np.empty(4)

            for i in range(4):
                step = np.zeros(4)
                step[i] = 1e-6
                numeric[i] = (kernel.value(x + step) - kernel.value(x - step)) / 2e-6

            np.testing.assert_allclose(kernel.grad_h(x), numeric, rtol=1e-6, atol=1e-8)


class TestHessianQuadraticForm:

    def test_euclidean(self):
        assert _kernel(K.SQUARED_EUCLIDEAN, 2).hessian_quadratic_form([5.0, -7.0], [1.0, 1.0]) == pytest.approx(2.0)

    def test_burg(self):
        assert _kernel(K.BURG_ENTROPY).hessian_quadratic_form([1.0], [1.0]) == pytest.approx(1.0)

    def test_shannon(self):
        assert _kernel(K.SHANNON_ENTROPY, 2).hessian_quadratic_form([2.0, 4.0], [2.0, 2.0]) == pytest.approx(3.0)


class TestLocalGain:

    def test_euclidean_scaling_is_exact(self, rng):
        kernel = _kernel(K.SQUARED_EUCLIDEAN, 3)

        for _ in range(1000):
            x, z, z_next = rng.uniform(-1.0, 1.0, size=(3, 3))
            theta = rng.uniform(0.05, 1.0)

            gain = kernel.local_ts_gain((1 - theta) * x + theta * z_next,
                                        (1 - theta) * x + theta * z,
                                        z_next,
                                        z,
                                        theta,
                                        2.0)

            assert gain == pytest.approx(1.0, rel=1e-8)

    def test_degenerate_step(self):
        kernel = _kernel(K.BURG_ENTROPY, 2)

        with pytest.raises(DegenerateStepError):
            kernel.local_ts_gain([1.0, 1.0], [1.0, 1.0], [2.0, 3.0], [2.0, 3.0], 0.5, 2.0)

    def test_burg_small_theta_approaches_intrinsic_limit(self):
        ratio = _kernel(K.BURG_ENTROPY).scaling_ratio([1.0], [2.0], [1.0], 1e-4, 2.0)

        assert ratio == pytest.approx(0.5 / (1 - math.log(2)), rel=1e-2)
        assert ratio == pytest.approx(1.6294, rel=1e-2)

    @pytest.mark.parametrize("kind", list(K))
    def test_intrinsic_limit(self, kind, rng):
        kernel = _kernel(kind, 3)

        for x, z, ztil in random_triples(rng, 100, 3, low=0.5, high=2.0):
            limit = kernel.intrinsic_limit(x, z, ztil)

            if limit < 1e-6:
                continue

            errors = []

            for theta in (1e-2, 1e-3, 1e-4):
                value = kernel.divergence((1 - theta) * x + theta * z, (1 - theta) * x + theta * ztil) / theta ** 2
                errors.append(abs(value - limit) / limit)

            assert errors[-1] < 1e-2
            assert errors[-1] <= errors[0] + 1e-6


class TestGainBound:

    def test_shannon_scalar(self):
        triple = _kernel(K.SHANNON_ENTROPY).gain_bound([1.0], [2.0], [1.0])

        assert triple.gamma == 2.0
        assert triple.gain == pytest.approx(1 / (2 * math.log(2) - 1), rel=1e-12)
        assert triple.gain == pytest.approx(2.58870, rel=1e-5)

    def test_euclidean_is_one(self, rng):
        x, z, ztil = rng.uniform(-3.0, 3.0, size=(3, 4))

        assert _kernel(K.SQUARED_EUCLIDEAN, 4).gain_bound(x, z, ztil).gain == 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateStepError):
            _kernel(K.BURG_ENTROPY, 2).gain_bound([1.0, 2.0], [1.0, 1.0], [1.0, 1.0])

    @pytest.mark.parametrize("kind", [K.SHANNON_ENTROPY, K.BURG_ENTROPY])
    def test_bound_is_valid_on_theta_grid(self, kind, rng):
        kernel = _kernel(kind, 3)

        for x, z, ztil in random_triples(rng, 100, 3):
            gain = kernel.gain_bound(x, z, ztil).gain

            for theta in THETA_GRID:
                lhs = kernel.divergence((1 - theta) * x + theta * z, (1 - theta) * x + theta * ztil)

                assert lhs <= gain * theta ** 2 * kernel.divergence(z, ztil) * (1 + 1e-9)


class TestUniformScaling:

    def test_kl_has_exponent_one(self, rng):
        kernel = _kernel(K.SHANNON_ENTROPY, 3)

        for x, z, ztil in random_triples(rng, 100, 3):
            for theta in THETA_GRID:
                lhs = kernel.divergence((1 - theta) * x + theta * z, (1 - theta) * x + theta * ztil)

                assert lhs <= theta * kernel.divergence(z, ztil) * (1 + 1e-9)

    def test_is_counterexample_at_exponent_0_6(self):
        kernel = _kernel(K.BURG_ENTROPY)
        c = IS_COUNTEREXAMPLE

        assert kernel.scaling_ratio(c["x"], c["z"], c["ztil"], c["theta"], 0.6) > 1.0
        assert kernel.scaling_ratio(c["x"], c["z"], c["ztil"], c["theta"], 0.6) == pytest.approx(1.630, rel=1e-3)

    def test_empirical_estimate_euclidean(self, rng):
        kernel = _kernel(K.SQUARED_EUCLIDEAN, 3)
        triples = random_triples(rng, 20, 3)

        assert kernel.empirical_uniform_tse(triples, [0.1, 0.5], [1.0, 1.5, 2.0, 2.5], rtol=1e-9) == 2.0

    def test_empirical_estimate_kl(self, rng):
        kernel = _kernel(K.SHANNON_ENTROPY, 3)
        triples = random_triples(rng, 20, 3)

        assert kernel.empirical_uniform_tse(triples, THETA_GRID, [0.5, 1.0], rtol=1e-9) == 1.0

    def test_empirical_estimate_is_rejects_0_6(self):
        kernel = _kernel(K.BURG_ENTROPY)
        c = IS_COUNTEREXAMPLE

        assert kernel.empirical_uniform_tse([(c["x"], c["z"], c["ztil"])], [c["theta"]], [0.6, 1.0, 2.0]) is None


class TestMinimizer:

    @pytest.mark.parametrize("kind", list(K))
    def test_simplex_center(self, kind):
        np.testing.assert_allclose(_kernel(kind, 4).minimizer_on(FEASIBLE_SET.SIMPLEX), np.full(4, 0.25))

    def test_shannon_orthant(self):
        np.testing.assert_allclose(_kernel(K.SHANNON_ENTROPY, 2).minimizer_on(FEASIBLE_SET.NONNEG_ORTHANT),
                                   np.full(2, math.exp(-1)))

    def test_burg_orthant_has_none(self):
        assert _kernel(K.BURG_ENTROPY, 2).minimizer_on(FEASIBLE_SET.NONNEG_ORTHANT) is None
