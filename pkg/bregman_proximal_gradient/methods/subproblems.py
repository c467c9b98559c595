#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""Exact solvers for the prox-type subproblems of the solver family.

Both query types reduce to the same problem: minimize <a, z> + w * Psi(z) + c * h(z) over the feasible set.
For a prox query a = g - c * grad_h(ref_point) and w = 1, since D_h(z, ref) differs from h(z) - <grad_h(ref), z> only by a
constant. For a dual-averaging query a = g_accum, c = L and w = theta_accum.
"""


from ..assisting_modules.errors import ConfigurationError, UnboundedSubproblemError
from ..assisting_modules.feasible_set import FEASIBLE_SET
from ..assisting_modules.useful_functions import project_onto_simplex, safeguarded_newton
from .kernels import BregmanKernel
from .objectives import Regularizer

import dataclasses
import logging

import numpy as np


logger = logging.getLogger(__name__)

_EXPONENT_CLIP = 700.0

_KERNEL = BregmanKernel.KIND
_REG = Regularizer.KIND

SUPPORTED_PAIRINGS = frozenset(
    [(_KERNEL.BURG_ENTROPY, FEASIBLE_SET.SIMPLEX, _REG.ZERO),
     (_KERNEL.BURG_ENTROPY, FEASIBLE_SET.NONNEG_ORTHANT, _REG.ZERO),
     (_KERNEL.BURG_ENTROPY, FEASIBLE_SET.NONNEG_ORTHANT, _REG.SQUARED_L2),
     (_KERNEL.SHANNON_ENTROPY, FEASIBLE_SET.NONNEG_ORTHANT, _REG.ZERO),
     (_KERNEL.SHANNON_ENTROPY, FEASIBLE_SET.NONNEG_ORTHANT, _REG.L1)]
    + [(_KERNEL.SQUARED_EUCLIDEAN, feasible_set, reg)
       for feasible_set in FEASIBLE_SET
       for reg in _REG]
)


@dataclasses.dataclass(frozen=True)
class ProxQuery:
    """argmin over the feasible set of <g, z> + Psi(z) + coeff * D_h(z, ref_point)."""

    g: np.ndarray
    ref_point: np.ndarray
    coeff: float
    reg: Regularizer
    feasible_set: FEASIBLE_SET

    def __post_init__(self):
        if not (self.coeff > 0):
            raise ConfigurationError("the prox coefficient must be positive, but found: {}.".format(self.coeff))


@dataclasses.dataclass(frozen=True)
class DualAvgQuery:
    """argmin over the feasible set of <g_accum, z> + theta_accum * Psi(z) + L * h(z)."""

    g_accum: np.ndarray
    theta_accum: float
    L: float
    reg: Regularizer
    feasible_set: FEASIBLE_SET

    def __post_init__(self):
        if not (self.theta_accum > 0):
            raise ConfigurationError("the accumulated weight must be positive, but found: {}.".format(self.theta_accum))

        if not (self.L > 0):
            raise ConfigurationError("L must be positive, but found: {}.".format(self.L))


def check_pairing(kernel_kind, feasible_set, reg_kind):
    """Raises 'ConfigurationError' unless an exact solver exists for the combination."""
    if (kernel_kind, feasible_set, reg_kind) not in SUPPORTED_PAIRINGS:
        raise ConfigurationError("no subproblem solver for kernel '{}' on '{}' with regularizer '{}'.".format(kernel_kind.value,
                                                                                                             feasible_set.value,
                                                                                                             reg_kind.value))


def prox_step(kernel, q):
    g = np.asarray(q.g, dtype=float)
    ref_point = np.asarray(q.ref_point, dtype=float)

    assert (g.shape == (kernel.dimension,)), "'g' must have the dimension of the kernel."

    check_pairing(kernel.kind, q.feasible_set, q.reg.kind)

    a = g - q.coeff * kernel.grad_h(ref_point)

    return _minimize_linearized(kernel, a, q.coeff, 1.0, q.reg, q.feasible_set)


def dual_avg_step(kernel, q):
    g_accum = np.asarray(q.g_accum, dtype=float)

    assert (g_accum.shape == (kernel.dimension,)), "'g_accum' must have the dimension of the kernel."

    check_pairing(kernel.kind, q.feasible_set, q.reg.kind)

    return _minimize_linearized(kernel, g_accum, q.L, q.theta_accum, q.reg, q.feasible_set)


def _minimize_linearized(kernel, a, c, w, reg, feasible_set):
    if kernel.is_euclidean:
        return _euclidean(a, c, w, reg, feasible_set)

    if kernel.is_shannon:
        return _shannon_orthant(a, c, w, reg)

    if feasible_set == FEASIBLE_SET.SIMPLEX:
        return _burg_simplex(a, c)

    return _burg_orthant(a, c, w * reg.lam if reg.kind == _REG.SQUARED_L2 else 0.0)


def _euclidean(a, c, w, reg, feasible_set):
    # On both sets z >= 0, so the L1 term is linear and the squared L2 term only adds curvature.
    linear = a + (w * reg.lam if reg.kind == _REG.L1 else 0.0)
    curvature = c + (w * reg.lam if reg.kind == _REG.SQUARED_L2 else 0.0)

    unconstrained = -linear / curvature

    if feasible_set == FEASIBLE_SET.SIMPLEX:
        return project_onto_simplex(unconstrained)

    return np.maximum(unconstrained, 0.0)


def _shannon_orthant(a, c, w, reg):
    exponent = -(a + w * reg.lam) / c - 1.0

    if np.abs(exponent).max() > _EXPONENT_CLIP:
        logger.warning("entropy prox exponent clipped at +-%s (largest magnitude %.3e).",
                       _EXPONENT_CLIP,
                       np.abs(exponent).max())

        exponent = np.clip(exponent, -_EXPONENT_CLIP, _EXPONENT_CLIP)

    return np.exp(exponent)


def _burg_orthant(a, c, quad):
    if quad > 0:
        # Positive root of quad * z^2 + a * z - c = 0, written so that no subtraction of nearly equal numbers occurs.
        root = np.sqrt(a * a + 4.0 * quad * c)
        positive = a >= 0

        z = np.empty_like(a)
        z[positive] = 2.0 * c / (a[positive] + root[positive])
        z[~positive] = (root[~positive] - a[~positive]) / (2.0 * quad)
        return z

    bad = a <= 0

    if bad.any():
        i = int(np.argmax(bad))
        raise UnboundedSubproblemError("the effective linear coefficient of coordinate {} is {!r}, so the barrier cannot "
                                       "hold the subproblem bounded; Burg subproblems on the orthant need it strictly "
                                       "positive.".format(i, a[i]),
                                       coordinate=i)

    return c / a


def _burg_simplex(a, c):
    n = a.size

    # z_i(lam) = c / (a_i + lam) and sum(z(lam)) decreases convexly from +inf at the pole 'lo'. At lo + n * c every
    # coordinate is at most 1/n, so the root lies in the bracket. Newton from the left of the root is monotone.
    lo = -float(a.min())
    hi = lo + n * c

    def excess(lam):
        return float(np.sum(c / (a + lam))) - 1.0

    def slope(lam):
        return -float(np.sum(c / (a + lam) ** 2))

    lam = safeguarded_newton(excess, slope, lo, hi, lo + 0.5 * c, increasing=False, tol=1e-12)

    z = c / (a + lam)
    return z / z.sum()
