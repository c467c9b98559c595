#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""The solver family. Every solver runs a fixed number of iterations and returns a 'SolverTrace'.

Row k of a trace describes iteration k: the theta, exponent and gain used there, the number of inner trials, the
cumulative gradient calls, and F at the iterate x_{k+1} the iteration produced. F(x_0) is kept in 'F_initial'.
"""


from ..assisting_modules.errors import (AdaptationError, BregmanError, ConfigurationError, DegenerateStepError,
                                        DomainError, UnboundedSubproblemError)
from .stepsize import ThetaSequence

import dataclasses
import enum
import logging
import math
import time

import numpy as np


logger = logging.getLogger(__name__)

# Inner trials per iteration for the line search and the gain adaptation.
MAX_TRIALS = 60

# Relative slack of the acceptance tests, so that rounding alone never rejects an exact step.
_ACCEPT_RTOL = 1e-12

# Below this exponent the theta recursion degenerates.
_GAMMA_FLOOR = 1e-12

_MONOTONE_RTOL = 1e-10


@dataclasses.dataclass
class SolverConfig:
    """Parameters of one solver run. 'theta_mode=None' selects the default mode of the algorithm."""

    class ALGORITHM(enum.Enum):
        BPG = "bpg"
        BPG_LS = "bpg-ls"
        ABPG = "abpg"
        ABPG_E = "abpg-e"
        ABPG_G = "abpg-g"
        ABDA = "abda"

    algorithm: enum.Enum
    gamma: float = 2.0
    gamma0: float = 3.0
    gamma_min: float = 0.0
    delta: float = 0.2
    rho: float = 1.5
    G_min: float = 1e-3
    max_iter: int = 1000
    theta_mode: enum.Enum = None
    restart: bool = False

    def __post_init__(self):
        A = self.__class__.ALGORITHM
        MODE = ThetaSequence.MODE

        if not isinstance(self.algorithm, A):
            raise ConfigurationError("'algorithm' must be a member of 'SolverConfig.ALGORITHM', but found: {!r}.".format(
                self.algorithm))

        if not (0 < self.gamma <= 2.5):
            raise ConfigurationError("gamma must lie in (0, 2.5], but found: {}.".format(self.gamma))

        if not (self.rho > 1):
            raise ConfigurationError("rho must exceed 1, but found: {}.".format(self.rho))

        if not (self.G_min > 0):
            raise ConfigurationError("G_min must be positive, but found: {}.".format(self.G_min))

        if not (self.delta > 0):
            raise ConfigurationError("delta must be positive, but found: {}.".format(self.delta))

        if not (self.gamma0 >= self.gamma_min >= 0):
            raise ConfigurationError("gamma0 >= gamma_min >= 0 must hold, but found gamma0 = {} and gamma_min = {}.".format(
                self.gamma0,
                self.gamma_min))

        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigurationError("max_iter must be a positive integer, but found: {}.".format(self.max_iter))

        self.max_iter = int(self.max_iter)

        if self.restart and self.algorithm not in (A.ABPG, A.ABPG_G):
            raise ConfigurationError("restart is only supported for ABPG and ABPG-g, not {}.".format(self.algorithm.value))

        defaults = {A.ABPG   : MODE.EXPLICIT,
                    A.ABPG_E : MODE.EQUALITY_ROOT,
                    A.ABPG_G : MODE.GAIN_COUPLED,
                    A.ABDA   : MODE.EQUALITY_ROOT}

        if self.algorithm not in defaults:
            # BPG and BPG-LS have no theta.
            self.theta_mode = None
            return

        if self.theta_mode is None:
            self.theta_mode = defaults[self.algorithm]

        gain_modes = (MODE.GAIN_COUPLED, MODE.GAIN_COUPLED_EXPLICIT)

        if self.algorithm == A.ABDA and self.theta_mode != MODE.EQUALITY_ROOT:
            raise ConfigurationError("ABDA needs the equality-root theta mode.")

        if self.algorithm == A.ABPG_E and self.theta_mode != MODE.EQUALITY_ROOT:
            raise ConfigurationError("ABPG-e needs the equality-root theta mode.")

        if (self.algorithm == A.ABPG_G) != (self.theta_mode in gain_modes):
            raise ConfigurationError("theta mode '{}' does not fit {}.".format(self.theta_mode.value,
                                                                             self.algorithm.value))

    @property
    def label(self):
        return self.algorithm.value + ("-rs" if self.restart else "")


@dataclasses.dataclass(frozen=True)
class TraceRow:
    k: int
    F: float
    theta: float
    gamma: float
    G: float
    Ghat: float
    inner: int
    grad_calls: int
    seconds: float


COLUMNS = tuple(field.name for field in dataclasses.fields(TraceRow))


@dataclasses.dataclass
class SolverTrace:
    algorithm: str
    F_initial: float
    x0: np.ndarray
    rows: list = dataclasses.field(default_factory=list)
    restarts: list = dataclasses.field(default_factory=list)
    x_final: np.ndarray = None
    x_best: np.ndarray = None
    F_best: float = math.inf

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name):
        assert (name in COLUMNS), "'name' must be one of {}.".format(COLUMNS)

        return np.array([getattr(row, name) for row in self.rows], dtype=float)

    def iterate_values(self):
        """F(x_0), F(x_1), ..., indexed by iterate number."""
        return np.concatenate(([self.F_initial], self.column("F")))

    def gaps(self, F_star):
        """F(x_{k+1}) - F* per row."""
        return self.column("F") - F_star

    def iterate_gaps(self, F_star):
        return self.iterate_values() - F_star


class _Recorder:
    """Builds the trace of one run and tracks the best iterate."""

    def __init__(self, label, problem, x0, on_iteration):
        F0 = problem.F(x0)

        self.trace = SolverTrace(label, F0, x0.copy(), x_best=x0.copy(), F_best=F0)
        self.grad_calls = 0

        self._on_iteration = on_iteration
        self._start = time.perf_counter()

    def record(self, k, x_next, F_next, *, theta=math.nan, gamma=math.nan, G=math.nan, Ghat=math.nan, inner=1):
        row = TraceRow(k, F_next, theta, gamma, G, Ghat, inner, self.grad_calls, time.perf_counter() - self._start)
        self.trace.rows.append(row)

        if F_next < self.trace.F_best:
            self.trace.F_best = F_next
            self.trace.x_best = x_next.copy()

        if self._on_iteration is not None:
            self._on_iteration(row)

    def finish(self, x):
        self.trace.x_final = x.copy()
        return self.trace


def _initial_point(problem, x0):
    x0 = np.array(x0, dtype=float)

    assert (x0.shape == (problem.dimension,)), "'x0' must have shape {}, but has {}.".format((problem.dimension,), x0.shape)

    if not problem.feasible_set.contains(x0, strict=not problem.kernel.is_euclidean, tol=1e-10):
        raise DomainError("the initial point is not strictly feasible for the {} set.".format(problem.feasible_set.value))

    return x0


def _accepts(lhs, rhs, floor=1.0):
    return lhs <= rhs + _ACCEPT_RTOL * max(floor, abs(rhs))


def _local_gain(kernel, x_next, y, z_next, z, theta, gamma):
    try:
        return kernel.local_ts_gain(x_next, y, z_next, z, theta, gamma)
    except DegenerateStepError:
        return math.nan


def _log_trials(name, k, trials):
    if trials > 10:
        logger.debug("%s iteration %d needed %d trials.", name, k, trials)


def run_bpg(problem, cfg, x0, *, on_iteration=None):
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    F_x = rec.trace.F_initial

    for k in range(cfg.max_iter):
        try:
            g = problem.objective.gradient(x)
            rec.grad_calls += 1

            x_next = problem.prox(g, x, problem.L)
            F_next = problem.F(x_next)
        except BregmanError as error:
            raise error.at_iteration(k)

        if F_next > F_x + _MONOTONE_RTOL * abs(F_x):
            logger.warning("BPG objective increased at iteration %d: %r -> %r.", k, F_x, F_next)

        rec.record(k, x_next, F_next)

        x, F_x = x_next, F_next

    return rec.finish(x)


def run_bpg_ls(problem, cfg, x0, *, on_iteration=None):
    """BPG with the gain line search: the prox coefficient G_k * L is the smallest tried gain that passes the sufficient
    decrease test."""
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    f, h = problem.objective, problem.kernel

    G_prev = 1.0
    F_x = rec.trace.F_initial

    for k in range(cfg.max_iter):
        try:
            g = f.gradient(x)
            f_x = f.value(x)
            rec.grad_calls += 1

            M = max(G_prev / cfg.rho, cfg.G_min)

            for t in range(MAX_TRIALS):
                G = M * cfg.rho ** t

                try:
                    x_next = problem.prox(g, x, G * problem.L)
                    f_next = f.value(x_next)
                except (UnboundedSubproblemError, DomainError):
                    continue

                # Relative slack only, and an accepted step never increases F.
                if (_accepts(f_next, f_x + np.dot(g, x_next - x) + G * problem.L * h.divergence(x_next, x), floor=0.0)
                        and f_next + problem.reg.value(x_next) <= F_x + _MONOTONE_RTOL * abs(F_x)):
                    break

            else:
                raise AdaptationError("line search failed after {} trials.".format(MAX_TRIALS))

            F_next = f_next + problem.reg.value(x_next)
        except BregmanError as error:
            raise error.at_iteration(k)

        _log_trials("BPG-LS", k, t + 1)

        rec.record(k, x_next, F_next, G=G, inner=t + 1)

        x, F_x, G_prev = x_next, F_next, G

    return rec.finish(x)


def _abpg(problem, cfg, x0, on_iteration, restart):
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    sequence = ThetaSequence(cfg.theta_mode, cfg.gamma)
    gamma, L = cfg.gamma, problem.L

    z = x.copy()
    F_x = rec.trace.F_initial

    for k in range(cfg.max_iter):
        try:
            theta = sequence.next_theta()

            y = (1 - theta) * x + theta * z
            g = problem.objective.gradient(y)
            rec.grad_calls += 1

            z_next = problem.prox(g, z, theta ** (gamma - 1) * L)
            x_next = (1 - theta) * x + theta * z_next
            F_next = problem.F(x_next)
        except BregmanError as error:
            raise error.at_iteration(k)

        Ghat = _local_gain(problem.kernel, x_next, y, z_next, z, theta, gamma)
        sequence.accept(theta)

        rec.record(k, x_next, F_next, theta=theta, gamma=gamma, Ghat=Ghat)

        z = _restart_if_increased(rec, sequence, k, F_x, F_next, x_next, z_next) if restart else z_next
        x, F_x = x_next, F_next

    return rec.finish(x)


def _restart_if_increased(rec, sequence, k, F_x, F_next, x_next, z_next):
    if F_next <= F_x:
        return z_next

    logger.info("%s restarted after iteration %d (F rose from %r to %r).", rec.trace.algorithm, k, F_x, F_next)

    rec.trace.restarts.append(k)
    sequence.reset()

    return x_next.copy()


def run_abpg(problem, cfg, x0, *, on_iteration=None):
    return _abpg(problem, cfg, x0, on_iteration, restart=False)


def run_abpg_e(problem, cfg, x0, *, on_iteration=None):
    """ABPG with exponent adaptation. theta_k is fixed by the previous iteration; only the exponent of the prox
    coefficient shrinks from trial to trial."""
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    sequence = ThetaSequence(ThetaSequence.MODE.EQUALITY_ROOT, cfg.gamma0)
    f, h, L = problem.objective, problem.kernel, problem.L

    z = x.copy()
    gamma_prev = cfg.gamma0

    for k in range(cfg.max_iter):
        try:
            theta = sequence.next_theta(gamma=gamma_prev)

            y = (1 - theta) * x + theta * z
            g = f.gradient(y)
            f_y = f.value(y)
            rec.grad_calls += 1

            t = 0

            while True:
                gamma_k = max(gamma_prev - cfg.delta * t, cfg.gamma_min)

                if gamma_k <= _GAMMA_FLOOR:
                    raise AdaptationError("exponent adaptation exhausted: no exponent above {} passed.".format(
                        _GAMMA_FLOOR))

                accepted = False

                try:
                    z_next = problem.prox(g, z, theta ** (gamma_k - 1) * L)
                    x_next = (1 - theta) * x + theta * z_next
                    f_next = f.value(x_next)
                    accepted = _accepts(f_next,
                                        f_y + np.dot(g, x_next - y) + theta ** gamma_k * L * h.divergence(z_next, z))
                except (UnboundedSubproblemError, DomainError):
                    pass

                t += 1

                if accepted:
                    break

                if gamma_k <= cfg.gamma_min:
                    raise AdaptationError("exponent adaptation reached gamma_min = {} without passing.".format(
                        cfg.gamma_min))

            F_next = f_next + problem.reg.value(x_next)
        except BregmanError as error:
            raise error.at_iteration(k)

        _log_trials("ABPG-e", k, t)

        Ghat = _local_gain(h, x_next, y, z_next, z, theta, gamma_k)
        sequence.accept(theta)

        rec.record(k, x_next, F_next, theta=theta, gamma=gamma_k, Ghat=Ghat, inner=t)

        x, z, gamma_prev = x_next, z_next, gamma_k

    return rec.finish(x)


def _abpg_g(problem, cfg, x0, on_iteration, restart):
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    sequence = ThetaSequence(cfg.theta_mode, cfg.gamma)
    f, h, L, gamma = problem.objective, problem.kernel, problem.L, cfg.gamma

    z = x.copy()
    G_prev = 1.0
    F_x = rec.trace.F_initial

    for k in range(cfg.max_iter):
        try:
            M = max(G_prev / cfg.rho, cfg.G_min)

            for t in range(MAX_TRIALS):
                G = M * cfg.rho ** t

                # theta is recomputed per trial except in the first iteration after a (re)start, where it stays 1.
                theta = sequence.next_theta(gain=G)

                y = (1 - theta) * x + theta * z
                g = f.gradient(y)
                rec.grad_calls += 1

                try:
                    z_next = problem.prox(g, z, G * theta ** (gamma - 1) * L)
                    x_next = (1 - theta) * x + theta * z_next
                    f_next = f.value(x_next)
                except (UnboundedSubproblemError, DomainError):
                    continue

                if _accepts(f_next, f.value(y) + np.dot(g, x_next - y) + G * theta ** gamma * L * h.divergence(z_next, z)):
                    break

            else:
                raise AdaptationError("gain adaptation failed after {} trials.".format(MAX_TRIALS))

            F_next = f_next + problem.reg.value(x_next)
        except BregmanError as error:
            raise error.at_iteration(k)

        _log_trials("ABPG-g", k, t + 1)

        Ghat = _local_gain(h, x_next, y, z_next, z, theta, gamma)
        sequence.accept(theta, G)

        rec.record(k, x_next, F_next, theta=theta, gamma=gamma, G=G, Ghat=Ghat, inner=t + 1)

        z = _restart_if_increased(rec, sequence, k, F_x, F_next, x_next, z_next) if restart else z_next
        x, F_x, G_prev = x_next, F_next, G

    return rec.finish(x)


def run_abpg_g(problem, cfg, x0, *, on_iteration=None):
    return _abpg_g(problem, cfg, x0, on_iteration, restart=False)


def run_abda(problem, cfg, x0, *, on_iteration=None):
    """Accelerated dual averaging. 'x0' is also z_0."""
    x = _initial_point(problem, x0)
    rec = _Recorder(cfg.label, problem, x, on_iteration)
    sequence = ThetaSequence(ThetaSequence.MODE.EQUALITY_ROOT, cfg.gamma)
    gamma = cfg.gamma

    z = x.copy()
    g_accum = np.zeros_like(x)
    theta_accum = 0.0

    for k in range(cfg.max_iter):
        try:
            theta = sequence.next_theta()

            y = (1 - theta) * x + theta * z
            g = problem.objective.gradient(y)
            rec.grad_calls += 1

            weight = theta ** (1 - gamma)
            g_accum += weight * g
            theta_accum += weight

            z_next = problem.dual_avg(g_accum, theta_accum)
            x_next = (1 - theta) * x + theta * z_next
            F_next = problem.F(x_next)
        except UnboundedSubproblemError as error:
            raise UnboundedSubproblemError("{} Dual averaging with the Burg kernel on the orthant needs the accumulated "
                                           "gradient to stay positive.".format(error),
                                           coordinate=error.coordinate).at_iteration(k) from error
        except BregmanError as error:
            raise error.at_iteration(k)

        Ghat = _local_gain(problem.kernel, x_next, y, z_next, z, theta, gamma)
        sequence.accept(theta)

        rec.record(k, x_next, F_next, theta=theta, gamma=gamma, Ghat=Ghat)

        x, z = x_next, z_next

    return rec.finish(x)


def run_with_restart(problem, cfg, x0, *, on_iteration=None):
    """Restarts the momentum (theta <- 1, z <- x_{k+1}) whenever F increases. The last accepted gain is kept."""
    A = SolverConfig.ALGORITHM

    if cfg.algorithm == A.ABPG:
        return _abpg(problem, cfg, x0, on_iteration, restart=True)

    if cfg.algorithm == A.ABPG_G:
        return _abpg_g(problem, cfg, x0, on_iteration, restart=True)

    raise ConfigurationError("restart is only supported for ABPG and ABPG-g, not {}.".format(cfg.algorithm.value))


_RUNNERS = {SolverConfig.ALGORITHM.BPG    : run_bpg,
            SolverConfig.ALGORITHM.BPG_LS : run_bpg_ls,
            SolverConfig.ALGORITHM.ABPG   : run_abpg,
            SolverConfig.ALGORITHM.ABPG_E : run_abpg_e,
            SolverConfig.ALGORITHM.ABPG_G : run_abpg_g,
            SolverConfig.ALGORITHM.ABDA   : run_abda}


def run_solver(problem, cfg, x0, *, on_iteration=None):
    if cfg.restart:
        return run_with_restart(problem, cfg, x0, on_iteration=on_iteration)

    return _RUNNERS[cfg.algorithm](problem, cfg, x0, on_iteration=on_iteration)


def reference_optimum(problem, x0, max_iter=1000):
    """(x_hat, F(x_hat)) from a restarted ABPG-g run with ten times the budget. Used as F* for optimality gaps."""
    cfg = SolverConfig(SolverConfig.ALGORITHM.ABPG_G, max_iter=10 * max_iter, restart=True)
    trace = run_with_restart(problem, cfg, x0)

    return trace.x_best, trace.F_best


def oracle_call_bound(k, G_k, G_ref=1.0, rho=1.5):
    """Upper bound on the gradient calls of iterations 0..k of the gain adaptation, G_ref being the gain before
    iteration 0."""
    return 2 * (k + 1) + math.log(G_k / G_ref) / math.log(rho)
