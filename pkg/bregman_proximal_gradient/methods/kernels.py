#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from ..assisting_modules.errors import DegenerateStepError, DomainError
from ..assisting_modules.feasible_set import FEASIBLE_SET

import dataclasses
import enum

import numpy as np
from scipy import special


@dataclasses.dataclass(frozen=True)
class TripleGain:
    """A triangle-scaling gain G(x, z, ztil) valid for the exponent 'gamma'."""

    x: np.ndarray
    z: np.ndarray
    ztil: np.ndarray
    gamma: float
    gain: float


class BregmanKernel:
    """A separable Legendre reference function h together with its Bregman distance D_h."""

    _DIM_ERR_MSG = "dimension {} was expected for {}, but found: {}."
    _DOMAIN_ERR_MSG = "{} must be {} (coordinate {} is {!r})."

    class KIND(enum.Enum):
        SQUARED_EUCLIDEAN = "euclidean"
        SHANNON_ENTROPY = "shannon"
        BURG_ENTROPY = "burg"

    def __init__(self, kind, dimension):
        assert isinstance(kind, self.__class__.KIND), "'kind' must be a member of 'BregmanKernel.KIND'."
        assert (int(dimension) > 0), "'dimension' must be a positive integer."

        self.kind = kind
        self.dimension = int(dimension)

    def __repr__(self):
        return "{}(kind='{}', dimension='{}')".format(self.__class__.__name__,
                                                      self.kind.value,
                                                      self.dimension)

    def __eq__(self, other):
        return isinstance(other, BregmanKernel) and (self.kind, self.dimension) == (other.kind, other.dimension)

    def __hash__(self):
        return hash((self.kind, self.dimension))

    # Shortcuts, because the kind is queried in almost every method.
    @property
    def is_euclidean(self):
        return self.kind == self.__class__.KIND.SQUARED_EUCLIDEAN

    @property
    def is_shannon(self):
        return self.kind == self.__class__.KIND.SHANNON_ENTROPY

    @property
    def is_burg(self):
        return self.kind == self.__class__.KIND.BURG_ENTROPY

    def _vector(self, x, name):
        x = np.asarray(x, dtype=float)

        assert (x.shape == (self.dimension,)), self.__class__._DIM_ERR_MSG.format(self.dimension, name, x.shape)

        return x

    def _require_positive(self, x, name, *, allow_zero=False):
        bad = (x < 0) if allow_zero else (x <= 0)

        if bad.any():
            i = int(np.argmax(bad))
            requirement = "nonnegative" if allow_zero else "strictly positive"
            raise DomainError(self.__class__._DOMAIN_ERR_MSG.format(name, requirement, i, x[i]), coordinate=i)

    def _interior(self, x, name):
        x = self._vector(x, name)

        if not self.is_euclidean:
            self._require_positive(x, name)

        return x

    def value(self, x):
        """h(x)."""
        if self.is_euclidean:
            x = self._vector(x, "x")
            return 0.5 * float(np.dot(x, x))

        if self.is_shannon:
            x = self._vector(x, "x")
            self._require_positive(x, "x", allow_zero=True)
            return float(np.sum(special.xlogy(x, x)))

        x = self._interior(x, "x")
        return -float(np.sum(np.log(x)))

    def divergence(self, x, y):
        """D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, evaluated with the closed form of each kernel."""
        if self.is_euclidean:
            diff = self._vector(x, "x") - self._vector(y, "y")
            return 0.5 * float(np.dot(diff, diff))

        if self.is_shannon:
            # Boundary first arguments are admissible thanks to the convention 0 * log 0 = 0.
            x = self._vector(x, "x")
            self._require_positive(x, "x", allow_zero=True)
            y = self._interior(y, "y")
            return float(np.sum(special.kl_div(x, y)))

        x = self._interior(x, "x")
        y = self._interior(y, "y")
        ratio = x / y
        return float(np.sum(ratio - np.log(ratio) - 1.0))

    def grad_h(self, x):
        x = self._interior(x, "x")

        if self.is_euclidean:
            return x.copy()

        if self.is_shannon:
            return np.log(x) + 1.0

        return -1.0 / x

    def hessian_quadratic_form(self, x, v):
        """<hess h(x) v, v>. All kernels are separable, so the Hessian is never formed."""
        x = self._interior(x, "x")
        v = self._vector(v, "v")

        if self.is_euclidean:
            return float(np.dot(v, v))

        if self.is_shannon:
            return float(np.sum(v * v / x))

        return float(np.sum((v / x) ** 2))

    def local_ts_gain(self, x_next, y, z_next, z, theta, gamma):
        """D_h(x_next, y) / (theta^gamma * D_h(z_next, z)), the local triangle-scaling gain of one step."""
        assert (0 < theta <= 1), "'theta' must lie in (0, 1]."

        denominator = self.divergence(z_next, z)

        if denominator <= 0:
            raise DegenerateStepError("D_h(z_next, z) vanishes, the step has converged.")

        return self.divergence(x_next, y) / (theta ** gamma * denominator)

    def scaling_ratio(self, x, z, ztil, theta, gamma):
        """The triangle-scaling ratio of the triple (x, z, ztil) at the step 'theta'."""
        x = self._vector(x, "x")
        z = self._vector(z, "z")
        ztil = self._vector(ztil, "ztil")

        return self.local_ts_gain((1 - theta) * x + theta * z,
                                  (1 - theta) * x + theta * ztil,
                                  z,
                                  ztil,
                                  theta,
                                  gamma)

    def intrinsic_limit(self, x, z, ztil):
        """The limit of D_h((1-t)x + tz, (1-t)x + t ztil) / t^2 as t -> 0."""
        return 0.5 * self.hessian_quadratic_form(x, self._vector(z, "z") - self._vector(ztil, "ztil"))

    def gain_bound(self, x, z, ztil):
        """An explicit gain for which the triangle-scaling inequality holds with exponent 2 for every theta in (0, 1]."""
        x = self._interior(x, "x")
        z = self._interior(z, "z")
        ztil = self._interior(ztil, "ztil")

        if self.is_euclidean:
            return TripleGain(x, z, ztil, 2.0, 1.0)

        denominator = self.divergence(z, ztil)

        if denominator <= 0:
            raise DegenerateStepError("D_h(z, ztil) vanishes, no gain can be estimated.")

        diff_sq = (z - ztil) ** 2

        if self.is_shannon:
            numerator = np.sum(diff_sq / np.minimum(x, ztil))
        else:
            numerator = np.sum(diff_sq / np.minimum(np.minimum(x, z), ztil) ** 2)

        return TripleGain(x, z, ztil, 2.0, float(numerator) / denominator)

    def empirical_uniform_tse(self, triples, thetas, gammas, *, rtol=1e-12):
        """Largest exponent in 'gammas' for which no sampled triple violates the uniform triangle-scaling inequality.
        Returns 'None' if every exponent is violated. This is an estimate from samples, never a proof."""
        best = None

        for gamma in sorted(gammas):
            holds = True

            for x, z, ztil in triples:
                if self.divergence(z, ztil) <= 0:
                    continue

                if any(self.scaling_ratio(x, z, ztil, theta, gamma) > 1 + rtol for theta in thetas):
                    holds = False
                    break

            if not holds:
                break

            best = gamma

        return best

    def minimizer_on(self, feasible_set):
        """argmin of h over the feasible set, or 'None' if h is unbounded below there or the minimizer is not interior."""
        if feasible_set == FEASIBLE_SET.SIMPLEX:
            # Every kernel here is symmetric under permutations, so the barycenter is the minimizer.
            return feasible_set.center(self.dimension)

        if self.is_shannon:
            return np.full(self.dimension, np.exp(-1.0))

        return None
