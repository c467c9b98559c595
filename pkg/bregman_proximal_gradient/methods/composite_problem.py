#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from ..assisting_modules.errors import ConfigurationError
from ..assisting_modules.feasible_set import FEASIBLE_SET
from .kernels import BregmanKernel
from .objectives import Objective, Regularizer
from .subproblems import DualAvgQuery, ProxQuery, check_pairing, dual_avg_step, prox_step

import numpy as np


class CompositeProblem:
    """minimize F(x) = f(x) + Psi(x) over the feasible set, where f is L-smooth relative to the kernel h."""

    def __init__(self, objective, kernel, feasible_set, reg=None):
        assert isinstance(objective, Objective), "'objective' must be an instance of 'Objective'."
        assert isinstance(kernel, BregmanKernel), "'kernel' must be an instance of 'BregmanKernel'."
        assert isinstance(feasible_set, FEASIBLE_SET), "'feasible_set' must be a member of 'FEASIBLE_SET'."

        if reg is None:
            reg = Regularizer.zero()

        if objective.n != kernel.dimension:
            raise ConfigurationError("the objective acts on R^{}, but the kernel on R^{}.".format(objective.n,
                                                                                             kernel.dimension))

        # 'rel_smooth_L' is only a valid constant relative to the paired kernel.
        if objective.paired_kernel_kind != kernel.kind:
            raise ConfigurationError("objective '{}' is paired with the '{}' kernel, not '{}'.".format(objective.kind.value,
                                                                                                  objective.paired_kernel_kind.value,
                                                                                                  kernel.kind.value))

        check_pairing(kernel.kind, feasible_set, reg.kind)

        self.objective = objective
        self.kernel = kernel
        self.feasible_set = feasible_set
        self.reg = reg

    def __repr__(self):
        return "{}(objective='{}', kernel='{}', feasible_set='{}', reg='{}')".format(self.__class__.__name__,
                                                                                   self.objective.kind.value,
                                                                                   self.kernel.kind.value,
                                                                                   self.feasible_set.value,
                                                                                   self.reg.kind.value)

    @property
    def dimension(self):
        return self.kernel.dimension

    @property
    def L(self):
        return self.objective.rel_smooth_L

    def F(self, x):
        return self.objective.value(x) + self.reg.value(x)

    def lower_model(self, x, y):
        """f(y) + <grad f(y), x - y> + Psi(x)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)

        return self.objective.value(y) + float(np.dot(self.objective.gradient(y), x - y)) + self.reg.value(x)

    def upper_model(self, x, y):
        return self.lower_model(x, y) + self.L * self.kernel.divergence(x, y)

    def prox(self, g, ref_point, coeff):
        return prox_step(self.kernel, ProxQuery(g, ref_point, coeff, self.reg, self.feasible_set))

    def dual_avg(self, g_accum, theta_accum):
        return dual_avg_step(self.kernel, DualAvgQuery(g_accum, theta_accum, self.L, self.reg, self.feasible_set))
