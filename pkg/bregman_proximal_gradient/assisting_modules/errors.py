#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""Exceptions raised by the library. All of them derive from 'BregmanError', so callers can catch everything at once."""


class BregmanError(Exception):
    """Base class of all library errors."""

    # Solvers attach the index of the iteration in which the error occurred. 'None' means the error did not happen
    # inside a solver loop.
    iteration = None

    def at_iteration(self, k):
        """Returns the same error with the iteration index attached (the message is prefixed only once)."""
        if self.iteration is None:
            self.iteration = k

            if self.args:
                self.args = ("iteration {}: {}".format(k, self.args[0]),) + self.args[1:]

        return self


class DomainError(BregmanError, ValueError):
    """A point lies outside the domain of a kernel or an objective."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)

        # Index of the offending coordinate, if a single one can be named.
        self.coordinate = coordinate


class DegenerateStepError(BregmanError, ValueError):
    """A gain would be computed from a zero divergence (the step has converged)."""


class ConfigurationError(BregmanError, ValueError):
    """Invalid solver configuration, unsupported (kernel, feasible set, regularizer) pairing or bad dimensions."""


class UnboundedSubproblemError(BregmanError, ArithmeticError):
    """A prox or dual-averaging subproblem has no minimizer because its linear pull overwhelms the barrier."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class AdaptationError(BregmanError, RuntimeError):
    """A line search, gain adaptation or exponent adaptation loop ran out of trials."""


class RootFindingError(BregmanError, RuntimeError):
    """A scalar root finder did not converge. Should not occur for the equations solved in this package."""


class LibsvmParseError(BregmanError, ValueError):
    """A LibSVM file could not be parsed."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = "line {}: {}".format(line_number, message)

        super().__init__(message)
        self.line_number = line_number


class InstanceError(BregmanError, ValueError):
    """An instance file is malformed or a generated instance failed its consistency check."""
