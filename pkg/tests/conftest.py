#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from bregman_proximal_gradient import BregmanKernel, gen_doptimal, gen_least_squares, gen_poisson, gen_relentropy
from bregman_proximal_gradient.assisting_modules.useful_functions import make_generator

import numpy as np
import pytest


KERNEL_KINDS = list(BregmanKernel.KIND)


def random_triples(rng, count, dimension, low=0.1, high=10.0):
    return [tuple(rng.uniform(low, high, size=dimension) for _ in range(3))
            for _ in range(count)]


@pytest.fixture
def rng():
    return make_generator(20190611)


@pytest.fixture(params=KERNEL_KINDS, ids=[kind.value for kind in KERNEL_KINDS])
def kernel(request):
    return BregmanKernel(request.param, 3)


@pytest.fixture
def triples(rng):
    return random_triples(rng, 100, 3)


@pytest.fixture(scope="session")
def dopt_small():
    return gen_doptimal(10, 30, seed=3)


@pytest.fixture(scope="session")
def poisson_small():
    return gen_poisson(20, 10, seed=4)


@pytest.fixture(scope="session")
def relentropy_small():
    return gen_relentropy(20, 40, seed=5)


@pytest.fixture(scope="session")
def least_squares_small():
    return gen_least_squares(30, 15, seed=6)


@pytest.fixture(scope="session")
def small_instances(dopt_small, poisson_small, relentropy_small, least_squares_small):
    return {"dopt": dopt_small,
            "poisson": poisson_small,
            "relentropy": relentropy_small,
            "leastsq": least_squares_small}


def assert_close(actual, expected, rtol=1e-12, atol=1e-12):
    np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)
