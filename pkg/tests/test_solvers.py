#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from bregman_proximal_gradient import (FEASIBLE_SET, BregmanKernel, CompositeProblem, ConfigurationError, DomainError, Objective,
                                       SolverConfig, ThetaSequence, UnboundedSubproblemError, gen_doptimal,
                                       gen_least_squares, gen_poisson, gen_relentropy, oracle_call_bound, run_abda,
                                       run_abpg, run_abpg_e, run_abpg_g, run_bpg, run_bpg_ls, run_solver,
                                       run_with_restart)
from bregman_proximal_gradient.methods.harness import geo_mean_gains
from bregman_proximal_gradient.methods.solvers import COLUMNS

import numpy as np
import pytest


A = SolverConfig.ALGORITHM
MODE = ThetaSequence.MODE


def _cfg(algorithm, **kwargs):
    return SolverConfig(algorithm, **kwargs)


def _identity_least_squares(n=3):
    objective = Objective.least_squares(np.eye(n), np.zeros(n))
    return CompositeProblem(objective, BregmanKernel(BregmanKernel.KIND.SQUARED_EUCLIDEAN, n), FEASIBLE_SET.NONNEG_ORTHANT)


def _poisson_identity(b):
    b = np.asarray(b, dtype=float)
    objective = Objective.poisson_kl(np.eye(b.size), b)

    return CompositeProblem(objective, BregmanKernel(BregmanKernel.KIND.BURG_ENTROPY, b.size), FEASIBLE_SET.NONNEG_ORTHANT)


def _comparable(row):
    return tuple(getattr(row, name) for name in COLUMNS if name != "seconds")


@pytest.fixture(scope="module")
def nnls():
    """Nonnegative least squares in 50 variables with a known solution of value 0."""
    return gen_least_squares(80, 50, seed=7)


class TestSolverConfig:

    @pytest.mark.parametrize("kwargs", [{"gamma": 3.0},
                                        {"gamma": 0.0},
                                        {"rho": 1.0},
                                        {"G_min": 0.0},
                                        {"delta": -0.1},
                                        {"gamma0": 1.0, "gamma_min": 2.0},
                                        {"max_iter": 0}])
    def test_rejects_invalid_parameters(self, kwargs):
        with pytest.raises(ConfigurationError):
            _cfg(A.ABPG, **kwargs)

    def test_restart_only_for_abpg_and_gain_adaptation(self):
        with pytest.raises(ConfigurationError):
            _cfg(A.ABDA, restart=True)

        assert _cfg(A.ABPG_G, restart=True).label == "abpg-g-rs"
        assert _cfg(A.ABPG).label == "abpg"

    def test_default_theta_modes(self):
        assert _cfg(A.ABPG).theta_mode == MODE.EXPLICIT
        assert _cfg(A.ABPG_G).theta_mode == MODE.GAIN_COUPLED
        assert _cfg(A.ABDA).theta_mode == MODE.EQUALITY_ROOT
        assert _cfg(A.BPG, theta_mode=MODE.EXPLICIT).theta_mode is None

    @pytest.mark.parametrize("algorithm, mode", [(A.ABDA, MODE.EXPLICIT),
                                                 (A.ABPG, MODE.GAIN_COUPLED),
                                                 (A.ABPG_G, MODE.EQUALITY_ROOT)])
    def test_rejects_mismatched_theta_mode(self, algorithm, mode):
        with pytest.raises(ConfigurationError):
            _cfg(algorithm, theta_mode=mode)

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigurationError):
            SolverConfig("abpg")


class TestBPG:

    def test_identity_least_squares_converges_in_one_step(self):
        trace = run_bpg(_identity_least_squares(), _cfg(A.BPG, max_iter=3), np.ones(3))

        assert trace.rows[0].F == 0.0
        np.testing.assert_array_equal(trace.x_final, np.zeros(3))

    def test_poisson_fixed_point(self):
        b = np.array([0.5, 1.0, 2.0])
        trace = run_bpg(_poisson_identity(b), _cfg(A.BPG, max_iter=20), b)

        np.testing.assert_allclose(trace.x_final, b, rtol=1e-12)
        np.testing.assert_allclose(trace.column("F"), 0.0, atol=1e-12)

    @pytest.mark.parametrize("algorithm", [A.BPG, A.BPG_LS])
    def test_monotone(self, algorithm, small_instances):
        for instance in small_instances.values():
            values = run_solver(instance.problem, _cfg(algorithm, max_iter=1000), instance.x0).iterate_values()

            for before, after in zip(values, values[1:]):
                assert after <= before + 1e-10 * abs(before)

    def test_rejects_infeasible_start(self, dopt_small):
        with pytest.raises(DomainError) as info:
            run_bpg(dopt_small.problem, _cfg(A.BPG, max_iter=1), np.ones(dopt_small.problem.dimension))

        assert "strictly feasible" in str(info.value)

    def test_trace_bookkeeping(self, poisson_small):
        trace = run_bpg(poisson_small.problem, _cfg(A.BPG, max_iter=25), poisson_small.x0)

        assert [row.k for row in trace.rows] == list(range(25))
        np.testing.assert_array_equal(trace.column("grad_calls"), np.arange(1, 26))
        assert trace.F_initial == poisson_small.problem.F(poisson_small.x0)
        assert trace.F_best == min(trace.iterate_values())


class TestBPGLineSearch:

    def test_gain_stays_between_floor_and_rho(self, nnls):
        cfg = _cfg(A.BPG_LS, max_iter=200, G_min=1e-2)
        trace = run_bpg_ls(nnls.problem, cfg, nnls.x0)
        gains = trace.column("G")

        assert (gains >= cfg.G_min).all()
        assert (gains <= cfg.rho * (1 + 1e-12)).all()

    def test_stays_monotone_near_zero_optimum(self, least_squares_small):
        trace = run_bpg_ls(least_squares_small.problem, _cfg(A.BPG_LS, max_iter=1000), least_squares_small.x0)
        values = trace.iterate_values()

        assert trace.F_best < 1e-12
        assert (np.diff(values) <= 1e-10 * np.abs(values[:-1])).all()

    def test_one_gradient_per_iteration(self, dopt_small):
        trace = run_bpg_ls(dopt_small.problem, _cfg(A.BPG_LS, max_iter=50), dopt_small.x0)

        np.testing.assert_array_equal(trace.column("grad_calls"), np.arange(1, 51))
        assert (trace.column("inner") >= 1).all()


class TestABPG:

    @pytest.mark.parametrize("algorithm", [A.ABPG, A.ABPG_E])
    def test_first_step_is_a_bpg_step(self, algorithm, small_instances):
        for instance in small_instances.values():
            accelerated = run_solver(instance.problem, _cfg(algorithm, max_iter=1), instance.x0)
            plain = run_bpg(instance.problem, _cfg(A.BPG, max_iter=1), instance.x0)

            assert accelerated.rows[0].theta == 1.0
            np.testing.assert_allclose(accelerated.x_final, plain.x_final, rtol=1e-13, atol=1e-15)

    def test_accelerated_rate_bound(self, nnls):
        problem, x0 = nnls.problem, nnls.x0
        trace = run_abpg(problem, _cfg(A.ABPG, gamma=2.0, max_iter=1000), x0)

        distance = problem.L * problem.kernel.divergence(nnls.x_true, x0)
        ks = trace.column("k")

        assert (trace.column("F") <= (2.0 / (ks + 2.0)) ** 2 * distance + 1e-8).all()

    def test_root_mode_theta_stays_below_explicit(self, dopt_small):
        trace = run_abpg(dopt_small.problem, _cfg(A.ABPG, theta_mode=MODE.EQUALITY_ROOT, max_iter=100), dopt_small.x0)
        ks = trace.column("k")

        assert (trace.column("theta") <= 2.0 / (ks + 2.0)).all()

    def test_local_gain_is_recorded(self, dopt_small):
        trace = run_abpg(dopt_small.problem, _cfg(A.ABPG, max_iter=50), dopt_small.x0)
        gains = trace.column("Ghat")

        assert np.isfinite(gains).sum() > 0
        assert (gains[np.isfinite(gains)] > 0).all()

    @pytest.mark.parametrize("runner, algorithm, patched", [(run_abpg, A.ABPG, "prox"), (run_abda, A.ABDA, "dual_avg")])
    def test_iterate_is_convex_combination(self, runner, algorithm, patched, dopt_small, monkeypatch):
        problem = dopt_small.problem
        points, z_values = [], []

        original_F, original_step = problem.F, getattr(problem, patched)

        def recording_F(x):
            points.append(np.array(x, copy=True))
            return original_F(x)

        def recording_step(*args):
            z = original_step(*args)
            z_values.append(z.copy())
            return z

        monkeypatch.setattr(problem, "F", recording_F)
        monkeypatch.setattr(problem, patched, recording_step)

        trace = runner(problem, _cfg(algorithm, max_iter=30), dopt_small.x0)

        for k, row in enumerate(trace.rows):
            expected = (1 - row.theta) * points[k] + row.theta * z_values[k]

            np.testing.assert_allclose(points[k + 1], expected, rtol=0.0, atol=1e-14)


class TestABPGExponentAdaptation:

    def test_euclidean_keeps_exponent_two(self, nnls):
        trace = run_abpg_e(nnls.problem, _cfg(A.ABPG_E, gamma0=2.0, max_iter=200), nnls.x0)

        np.testing.assert_array_equal(trace.column("gamma"), 2.0)
        np.testing.assert_array_equal(trace.column("inner"), 1)

    def test_exponent_is_nonincreasing(self, poisson_small):
        cfg = _cfg(A.ABPG_E, gamma0=3.0, delta=0.2, max_iter=300)
        gammas = run_abpg_e(poisson_small.problem, cfg, poisson_small.x0).column("gamma")

        assert (np.diff(gammas) <= 0).all()
        assert gammas[0] <= 3.0
        assert gammas[-1] >= cfg.gamma_min


class TestABPGGainAdaptation:

    def test_euclidean_gain_stays_one(self, nnls):
        trace = run_abpg_g(nnls.problem, _cfg(A.ABPG_G, G_min=1.0, max_iter=200), nnls.x0)

        np.testing.assert_array_equal(trace.column("G"), 1.0)
        np.testing.assert_array_equal(trace.column("grad_calls"), np.arange(1, 201))

    @pytest.mark.parametrize("name", ["dopt", "poisson", "relentropy"])
    def test_oracle_calls(self, name, small_instances):
        instance = small_instances[name]
        cfg = _cfg(A.ABPG_G, max_iter=200)
        trace = run_abpg_g(instance.problem, cfg, instance.x0)

        calls = trace.column("grad_calls")
        np.testing.assert_array_equal(calls, np.cumsum(trace.column("inner")))

        for row in trace.rows:
            assert row.grad_calls <= oracle_call_bound(row.k, row.G, rho=cfg.rho) + 1e-9

    def test_gain_bound_along_trace(self, nnls):
        problem, x0 = nnls.problem, nnls.x0
        trace = run_abpg_g(problem, _cfg(A.ABPG_G, gamma=2.0, max_iter=500), x0)

        gains = geo_mean_gains(trace.column("G"), 2.0)
        ks = trace.column("k")
        distance = problem.L * problem.kernel.divergence(nnls.x_true, x0)

        assert (gains < 10).all()
        assert (trace.column("F") <= (2.0 / (ks + 2.0)) ** 2 * gains * distance + 1e-8).all()

    def test_gain_explicit_mode(self, poisson_small):
        cfg = _cfg(A.ABPG_G, theta_mode=MODE.GAIN_COUPLED_EXPLICIT, max_iter=100)
        trace = run_abpg_g(poisson_small.problem, cfg, poisson_small.x0)

        assert trace.rows[0].theta == 1.0
        assert (trace.column("G") >= cfg.G_min).all()
        assert trace.F_best < trace.F_initial


class TestABDA:

    def test_matches_abpg_from_kernel_minimizer(self, dopt_small):
        problem, x0 = dopt_small.problem, dopt_small.x0

        abda = run_abda(problem, _cfg(A.ABDA, max_iter=500), x0)
        abpg = run_abpg(problem, _cfg(A.ABPG, theta_mode=MODE.EQUALITY_ROOT, max_iter=500), x0)

        np.testing.assert_allclose(abda.column("F"), abpg.column("F"), rtol=1e-8)

    def test_dual_averaging_bound(self, dopt_small):
        problem, x0 = dopt_small.problem, dopt_small.x0
        trace = run_abda(problem, _cfg(A.ABDA, max_iter=300), x0)
        x_hat, F_hat = trace.x_best, trace.F_best

        ks = trace.column("k")
        bound = (2.0 / (ks + 2.0)) ** 2 * problem.L * (problem.kernel.value(x_hat) - problem.kernel.value(x0))

        assert (trace.column("F") - F_hat <= bound + 1e-8).all()

    def test_unbounded_subproblem_names_the_iteration(self):
        with pytest.raises(UnboundedSubproblemError) as info:
            run_abda(_poisson_identity([4.0, 4.0]), _cfg(A.ABDA, max_iter=5), np.ones(2))

        assert info.value.iteration == 0
        assert str(info.value).startswith("iteration 0:")
        assert "accumulated gradient" in str(info.value)


class TestRestart:

    @pytest.mark.parametrize("algorithm", [A.ABPG, A.ABPG_G])
    def test_agrees_with_plain_run_until_first_restart(self, algorithm, relentropy_small):
        problem, x0 = relentropy_small.problem, relentropy_small.x0

        plain = run_solver(problem, _cfg(algorithm, max_iter=150), x0)
        restarted = run_with_restart(problem, _cfg(algorithm, max_iter=150, restart=True), x0)

        stop = restarted.restarts[0] + 1 if restarted.restarts else len(plain)

        assert restarted.algorithm.endswith("-rs")
        assert [_comparable(row) for row in restarted.rows[:stop]] == [_comparable(row) for row in plain.rows[:stop]]

    def test_monotone_run_is_unchanged(self):
        problem = _identity_least_squares()

        plain = run_abpg(problem, _cfg(A.ABPG, max_iter=10), np.ones(3))
        restarted = run_with_restart(problem, _cfg(A.ABPG, max_iter=10, restart=True), np.ones(3))

        assert restarted.restarts == []
        assert [_comparable(row) for row in restarted.rows] == [_comparable(row) for row in plain.rows]

    def test_restart_resets_theta(self, nnls):
        trace = run_with_restart(nnls.problem, _cfg(A.ABPG, max_iter=400, restart=True), nnls.x0)
        values = trace.iterate_values()

        assert trace.restarts

        for k in trace.restarts:
            assert values[k + 1] > values[k]

            if k + 1 < len(trace):
                assert trace.rows[k + 1].theta == 1.0

    def test_rejects_other_algorithms(self, nnls):
        cfg = _cfg(A.ABPG_E)

        with pytest.raises(ConfigurationError):
            run_with_restart(nnls.problem, cfg, nnls.x0)


@pytest.mark.slow
class TestReproductions:

    def test_dopt_local_gain_below_one(self):
        instance = gen_doptimal(80, 200, seed=1)
        trace = run_abpg(instance.problem, _cfg(A.ABPG, gamma=2.0, max_iter=1000), instance.x0)
        gains = trace.column("Ghat")

        assert (gains[np.isfinite(gains)] < 1).all()

    @pytest.mark.parametrize("algorithm", [A.BPG, A.BPG_LS])
    @pytest.mark.parametrize("generator, m, n",
                             [(gen_doptimal, 80, 200), (gen_poisson, 200, 100), (gen_relentropy, 100, 1000)],
                             ids=["dopt", "poisson", "relentropy"])
    def test_monotone_at_scale(self, algorithm, generator, m, n):
        instance = generator(m, n, seed=1)
        values = run_solver(instance.problem, _cfg(algorithm, max_iter=1000), instance.x0).iterate_values()

        assert (np.diff(values) <= 1e-10 * np.abs(values[:-1])).all()

    def test_poisson_exponent_settles_between_two_and_three(self):
        instance = gen_poisson(200, 100, seed=1)
        cfg = _cfg(A.ABPG_E, gamma0=3.0, delta=0.2, max_iter=5000)
        gammas = run_abpg_e(instance.problem, cfg, instance.x0).column("gamma")

        assert 2.0 <= gammas[-1] <= 3.0

    def test_relentropy_restart_helps(self):
        instance = gen_relentropy(100, 1000, seed=1)
        plain = run_abpg_g(instance.problem, _cfg(A.ABPG_G, max_iter=1000), instance.x0)
        restarted = run_with_restart(instance.problem, _cfg(A.ABPG_G, max_iter=1000, restart=True), instance.x0)

        assert restarted.rows[-1].F <= plain.rows[-1].F
