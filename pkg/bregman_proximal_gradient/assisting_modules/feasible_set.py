#! /usr/bin/env python3
# -*- coding: utf-8 -*-


import enum

import numpy as np


class FEASIBLE_SET(enum.Enum):
    """Represents the closed convex set C the iterates live in.
    Every kernel keeps the iterates in the relative interior, so membership checks are strict where the kernel is a barrier."""

    SIMPLEX = "simplex"
    NONNEG_ORTHANT = "orthant"

    def center(self, dimension):
        """A canonical strictly feasible point: the simplex barycenter or the all-ones vector."""
        if self == self.__class__.SIMPLEX:
            return np.full(dimension, 1.0 / dimension)

        return np.ones(dimension)

    def contains(self, x, *, strict=False, tol=1e-12):
        x = np.asarray(x, dtype=float)

        positive = (x.min() > 0) if strict else (x.min() >= 0)

        if self == self.__class__.SIMPLEX:
            return bool(positive and abs(x.sum() - 1.0) <= tol * max(1, x.size))

        return bool(positive)

    def sample_interior(self, rng, dimension, *, low=0.1, high=2.0):
        """Draws a random strictly feasible point. On the simplex the Dirichlet(1,...,1) distribution is used."""
        if self == self.__class__.SIMPLEX:
            x = rng.dirichlet(np.ones(dimension))

            # Dirichlet samples may contain coordinates that underflow to zero for large dimensions.
            x = np.maximum(x, 1e-12)
            return x / x.sum()

        return rng.uniform(low, high, size=dimension)

    @classmethod
    def from_name(cls, name):
        for member in cls:
            if name in (member.value, member.name, member.name.lower()):
                return member

        raise ValueError("unrecognized feasible set: {}.".format(name))
