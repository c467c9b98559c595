#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from ..assisting_modules.useful_functions import safeguarded_newton

import enum

import numpy as np


def theta_explicit(gamma, k):
    assert (k >= 0), "'k' must be nonnegative."

    return gamma / (k + gamma)


def theta_condition_holds(gamma, theta_next, theta_k, G_k=1.0, G_k1=1.0, *, rtol=0.0):
    """Whether (1 - theta_next) / (G_k1 * theta_next^gamma) <= 1 / (G_k * theta_k^gamma), up to the relative tolerance."""
    lhs = (1.0 - theta_next) / (G_k1 * theta_next ** gamma)
    rhs = 1.0 / (G_k * theta_k ** gamma)

    return lhs <= rhs * (1.0 + rtol)


def theta_next_gain_equality(gamma, theta_k, G_k, G_k1):
    """The root in (0, 1) of (1 - theta) / (G_k1 * theta^gamma) = 1 / (G_k * theta_k^gamma)."""
    assert (0 < theta_k <= 1), "'theta_k' must lie in (0, 1]."
    assert (gamma > 0) and (G_k > 0) and (G_k1 > 0), "'gamma' and the gains must be positive."

    # The equation reads theta^gamma = c * (1 - theta).
    c = (G_k / G_k1) * theta_k ** gamma

    if gamma == 1:
        theta = c / (1.0 + c)

    else:
        # The residual is scaled by 1/c, so the tolerance is relative to the size of both sides. It is increasing and,
        # for gamma > 1, convex, so Newton started right of the root never overshoots.
        def residual(theta):
            return theta ** gamma / c + theta - 1.0

        def derivative(theta):
            return gamma * theta ** (gamma - 1.0) / c + 1.0

        start = min(1.0, c ** (1.0 / gamma))
        theta = safeguarded_newton(residual, derivative, 0.0, 1.0, start, increasing=True, tol=1e-14)

    # A rounded root may miss the inequality by an ulp. Move up until it holds, which only decreases the left side.
    for _ in range(64):
        if theta_condition_holds(gamma, theta, theta_k, G_k, G_k1):
            break

        theta = np.nextafter(theta, 1.0)

    return float(theta)


def theta_next_root(gamma, theta_k):
    return theta_next_gain_equality(gamma, theta_k, 1.0, 1.0)


def theta_next_gain_explicit(gamma, theta_k, alpha_k):
    """Linearized gain-coupled rule, alpha_k = G_{k+1} / G_k. Reproduces gamma/(k + gamma) when every alpha_k is 1."""
    assert (0 < theta_k <= 1), "'theta_k' must lie in (0, 1]."
    assert (alpha_k > 0), "'alpha_k' must be positive."

    denominator = 1.0 + alpha_k * (gamma - 1.0)

    return 1.0 / ((gamma * alpha_k / denominator) / theta_k + 1.0 / denominator)


class ThetaSequence:
    """Produces theta_0 = 1, theta_1, ... one value at a time.

    A solver asks for the candidate of the coming iteration with 'next_theta', possibly several times with different
    gains or exponents, and commits the value it used with 'accept'. 'reset' starts a new sequence (restart) and keeps
    the last accepted gain."""

    class MODE(enum.Enum):
        EXPLICIT = "explicit"
        EQUALITY_ROOT = "root"
        GAIN_COUPLED = "gain"
        GAIN_COUPLED_EXPLICIT = "gain-explicit"

    def __init__(self, mode, gamma):
        assert isinstance(mode, self.__class__.MODE), "'mode' must be a member of 'ThetaSequence.MODE'."
        assert (gamma > 0), "'gamma' must be positive."

        self.mode = mode
        self.gamma = gamma

        self._theta = 1.0
        self._gain = 1.0

        # Number of accepted values since construction or the last reset.
        self._steps = 0

    def __repr__(self):
        return "{}(mode='{}', gamma='{}', current_theta='{}', current_gain='{}')".format(self.__class__.__name__,
                                                                                      self.mode.value,
                                                                                      self.gamma,
                                                                                      self._theta,
                                                                                      self._gain)

    @property
    def current_theta(self):
        return self._theta

    @property
    def current_gain(self):
        return self._gain

    @property
    def steps(self):
        return self._steps

    @property
    def is_gain_coupled(self):
        return self.mode in (self.__class__.MODE.GAIN_COUPLED, self.__class__.MODE.GAIN_COUPLED_EXPLICIT)

    def next_theta(self, *, gamma=None, gain=None):
        """The theta of the coming iteration. 'gamma' overrides the exponent (exponent adaptation); 'gain' is the tentative
        gain of the coming iteration and is required by the gain-coupled modes."""
        if self._steps == 0:
            return 1.0

        gamma = self.gamma if (gamma is None) else gamma
        MODE = self.__class__.MODE

        if self.mode == MODE.EXPLICIT:
            return theta_explicit(gamma, self._steps)

        if self.mode == MODE.EQUALITY_ROOT:
            return theta_next_root(gamma, self._theta)

        assert (gain is not None), "gain-coupled modes need the tentative gain."

        if self.mode == MODE.GAIN_COUPLED:
            return theta_next_gain_equality(gamma, self._theta, self._gain, gain)

        return theta_next_gain_explicit(gamma, self._theta, gain / self._gain)

    def accept(self, theta, gain=None):
        assert (0 < theta <= 1), "'theta' must lie in (0, 1]."

        self._theta = theta

        if gain is not None:
            self._gain = gain

        self._steps += 1

    def reset(self):
        self._theta = 1.0
        self._steps = 0

    def take(self, count):
        """The first 'count' values of an uncoupled sequence, starting from the current state."""
        assert not self.is_gain_coupled, "'take' needs a mode without gains."

        thetas = []

        for _ in range(count):
            theta = self.next_theta()
            self.accept(theta)
            thetas.append(theta)

        return thetas
