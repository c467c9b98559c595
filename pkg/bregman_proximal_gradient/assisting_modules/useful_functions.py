#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""A non-thematic collection of numerical helpers shared by the methods."""


from .errors import RootFindingError

import math

import numpy as np


def make_generator(seed):
    """The single pseudo-random generator family used throughout the package: numpy's PCG64, seeded explicitly."""
    return np.random.Generator(np.random.PCG64(seed))


def safeguarded_newton(fun, fprime, lo, hi, x0, *, increasing, tol, max_iter=100):
    """Finds the root of a monotone scalar function on the open bracket (lo, hi).
    Newton steps that leave the bracket are replaced by bisection steps. The bracket shrinks with every evaluation, so the
    method converges globally; it stops as soon as |fun(x)| <= tol."""

    x = x0

    for _ in range(max_iter):
        fx = fun(x)

        if abs(fx) <= tol:
            return x

        # Shrink the bracket. For an increasing function a positive value means the root lies to the left.
        if (fx > 0) == increasing:
            hi = x
        else:
            lo = x

        # The bracket cannot be split any further in double precision.
        if (hi - lo) <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            return x

        dfx = fprime(x)
        candidate = (x - fx / dfx) if (dfx != 0) else math.nan

        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)

        x = candidate

    fx = fun(x)

    if abs(fx) <= tol:
        return x

    raise RootFindingError("no convergence after {} iterations (residual {:.3e}).".format(max_iter, fx))


def project_onto_simplex(v):
    """Euclidean projection onto the standard simplex, computed by sorting."""
    v = np.asarray(v, dtype=float)
    n = v.size

    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0

    # The largest index whose shifted coordinate stays positive determines the threshold.
    indices = np.arange(1, n + 1)
    rho = np.nonzero(u - cumulative / indices > 0)[0][-1]
    threshold = cumulative[rho] / (rho + 1.0)

    return np.maximum(v - threshold, 0.0)


def loglog_slope(ks, values):
    """Least-squares slope of log(values) against log(ks)."""
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)

    slope, _ = np.polyfit(np.log(ks), np.log(values), 1)
    return float(slope)
