#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""Problem instances: seeded random families, LibSVM-derived D-optimal design, and a JSON file format.

Every random family draws from 'numpy.random.Generator(PCG64(seed))', the matrix first (row-major) and then the vectors,
so an instance is a pure function of (family, m, n, seed, regularizer).

Instance files are JSON objects with a header ('family', 'm', 'n', 'seed', 'reg', 'L', 'path', 'unit_norm') and a
payload ('A', 'b', 'x0', 'x_true'). Floats are written in their shortest round-trip form, so a saved instance loads
back bit for bit.
"""


from ..assisting_modules.errors import BregmanError, ConfigurationError, InstanceError, LibsvmParseError
from ..assisting_modules.feasible_set import FEASIBLE_SET
from ..assisting_modules.useful_functions import make_generator
from .composite_problem import CompositeProblem
from .kernels import BregmanKernel
from .objectives import Objective, Regularizer

import dataclasses
import enum
import json
import logging

import numpy as np


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclasses.dataclass(frozen=True)
class InstanceSpec:
    """What an instance was generated from. 'path' and 'unit_norm' only matter for LibSVM data."""

    class FAMILY(enum.Enum):
        DOPT_RANDOM = "dopt"
        DOPT_LIBSVM = "dopt-libsvm"
        POISSON_RANDOM = "poisson"
        RELENTROPY_RANDOM = "relentropy"
        LEAST_SQUARES = "leastsq"

    family: enum.Enum
    m: int
    n: int
    seed: int = None
    reg: Regularizer = None
    path: str = None
    unit_norm: bool = False


@dataclasses.dataclass
class Instance:
    spec: InstanceSpec
    problem: CompositeProblem
    x0: np.ndarray

    # Known nonnegative solution of the least-squares family (F* = 0).
    x_true: np.ndarray = None

    @property
    def objective(self):
        return self.problem.objective


def _require_dimensions(m, n):
    if int(m) < 1 or int(n) < 1:
        raise ConfigurationError("m and n must be positive, but found m = {} and n = {}.".format(m, n))


def _finish(spec, problem, x_true=None):
    x0 = problem.feasible_set.center(problem.dimension)

    try:
        F0 = problem.F(x0)
    except BregmanError as error:
        raise InstanceError("the initial point lies outside the domain: {}".format(error)) from error

    if not np.isfinite(F0):
        raise InstanceError("F(x0) is not finite.")

    check_relative_smoothness(problem, pairs=50, seed=0 if spec.seed is None else spec.seed)

    logger.info("generated %s instance (m=%d, n=%d, seed=%s, L=%r).",
                spec.family.value,
                spec.m,
                spec.n,
                spec.seed,
                problem.L)

    return Instance(spec, problem, x0, x_true)


def gen_doptimal(m, n, seed):
    _require_dimensions(m, n)

    if n < m + 1:
        raise ConfigurationError("D-optimal design needs n >= m + 1, but found m = {} and n = {}.".format(m, n))

    V = make_generator(seed).standard_normal((m, n))

    return _doptimal_instance(InstanceSpec(InstanceSpec.FAMILY.DOPT_RANDOM, m, n, seed, Regularizer.zero()), V)


def _doptimal_instance(spec, V):
    objective = Objective.d_optimal(V)
    kernel = BregmanKernel(BregmanKernel.KIND.BURG_ENTROPY, objective.n)

    return _finish(spec, CompositeProblem(objective, kernel, FEASIBLE_SET.SIMPLEX, Regularizer.zero()))


def gen_poisson(m, n, seed, reg=None):
    """Poisson inverse problem with A, b uniform on [0, 1). Without 'reg', an underdetermined instance (m < n) gets the
    squared L2 term with weight 0.001."""
    _require_dimensions(m, n)

    if reg is None:
        reg = Regularizer.squared_l2(0.001) if m < n else Regularizer.zero()

    rng = make_generator(seed)
    A = rng.uniform(0.0, 1.0, size=(m, n))
    b = rng.uniform(0.0, 1.0, size=m)

    spec = InstanceSpec(InstanceSpec.FAMILY.POISSON_RANDOM, m, n, seed, reg)

    return _finish(spec, _orthant_problem(Objective.poisson_kl(A, b), BregmanKernel.KIND.BURG_ENTROPY, reg))


def gen_relentropy(m, n, seed, reg=None):
    _require_dimensions(m, n)

    if reg is None:
        reg = Regularizer.l1(0.001)

    rng = make_generator(seed)
    A = rng.uniform(0.0, 1.0, size=(m, n))
    b = rng.uniform(0.0, 1.0, size=m)

    spec = InstanceSpec(InstanceSpec.FAMILY.RELENTROPY_RANDOM, m, n, seed, reg)

    return _finish(spec, _orthant_problem(Objective.rel_entropy(A, b), BregmanKernel.KIND.SHANNON_ENTROPY, reg))


def gen_least_squares(m, n, seed):
    """Nonnegative least squares with b = A x_true for a nonnegative x_true, so the optimal value is exactly 0."""
    _require_dimensions(m, n)

    rng = make_generator(seed)
    A = rng.standard_normal((m, n))
    x_true = rng.uniform(0.0, 1.0, size=n)
    b = np.dot(A, x_true)

    spec = InstanceSpec(InstanceSpec.FAMILY.LEAST_SQUARES, m, n, seed, Regularizer.zero())

    return _finish(spec,
                   _orthant_problem(Objective.least_squares(A, b), BregmanKernel.KIND.SQUARED_EUCLIDEAN, spec.reg),
                   x_true)


def _orthant_problem(objective, kernel_kind, reg):
    return CompositeProblem(objective, BregmanKernel(kernel_kind, objective.n), FEASIBLE_SET.NONNEG_ORTHANT, reg)


def load_libsvm(path):
    """Reads 'label idx:val idx:val ...' lines (1-based indices). Returns the design matrix with one column per sample
    and the labels."""
    labels = []
    samples = []
    m = 0
    first_line = None

    with open(path, "r") as file:
        for line_number, line in enumerate(file, start=1):
            tokens = line.split()

            if not tokens:
                continue

            if first_line is None:
                first_line = line_number

            try:
                label = float(tokens[0])
            except ValueError:
                raise LibsvmParseError("label {!r} is not numeric.".format(tokens[0]), line_number) from None

            entries = {}

            for token in tokens[1:]:
                index, colon, value = token.partition(":")

                if not colon:
                    raise LibsvmParseError("{!r} is not of the form 'index:value'.".format(token), line_number)

                try:
                    index = int(index)
                    value = float(value)
                except ValueError:
                    raise LibsvmParseError("{!r} is not a numeric 'index:value' pair.".format(token), line_number) from None

                if index < 1:
                    raise LibsvmParseError("feature indices start at 1, but found {}.".format(index), line_number)

                entries[index] = value
                m = max(m, index)

            labels.append(label)
            samples.append(entries)

    if not samples:
        raise LibsvmParseError("'{}' contains no samples.".format(path))

    if m == 0:
        raise LibsvmParseError("'{}' has labels but no feature entries.".format(path), first_line)

    V = np.zeros((m, len(samples)))

    for column, entries in enumerate(samples):
        for index, value in entries.items():
            V[index - 1, column] = value

    logger.info("read %d samples with %d features from '%s'.", V.shape[1], m, path)

    return V, np.array(labels)


def gen_doptimal_libsvm(path, unit_norm=False):
    V, _ = load_libsvm(path)

    if unit_norm:
        norms = np.linalg.norm(V, axis=0)
        V = V / np.where(norms > 0, norms, 1.0)

    m, n = V.shape

    if n < m + 1:
        raise ConfigurationError("D-optimal design needs more samples than features, but found m = {} and n = {}.".format(m,
                                                                                                                     n))

    spec = InstanceSpec(InstanceSpec.FAMILY.DOPT_LIBSVM, m, n, None, Regularizer.zero(), str(path), bool(unit_norm))

    return _doptimal_instance(spec, V)


def generate(spec):
    """Builds the instance described by 'spec'."""
    F = InstanceSpec.FAMILY

    if spec.family == F.DOPT_RANDOM:
        return gen_doptimal(spec.m, spec.n, spec.seed)

    if spec.family == F.DOPT_LIBSVM:
        return gen_doptimal_libsvm(spec.path, spec.unit_norm)

    if spec.family == F.POISSON_RANDOM:
        return gen_poisson(spec.m, spec.n, spec.seed, spec.reg)

    if spec.family == F.RELENTROPY_RANDOM:
        return gen_relentropy(spec.m, spec.n, spec.seed, spec.reg)

    return gen_least_squares(spec.m, spec.n, spec.seed)


def check_relative_smoothness(problem, pairs=50, seed=0, *, rtol=1e-10):
    """Samples interior pairs (x, y) and checks l(x|y) <= F(x) <= l(x|y) + L * D_h(x, y). Raises 'InstanceError' on the
    first violation."""
    rng = make_generator(seed)
    feasible_set = problem.feasible_set

    for _ in range(pairs):
        x = feasible_set.sample_interior(rng, problem.dimension)
        y = feasible_set.sample_interior(rng, problem.dimension)

        F_x = problem.F(x)
        lower = problem.lower_model(x, y)
        upper = lower + problem.L * problem.kernel.divergence(x, y)
        slack = rtol * max(1.0, abs(F_x))

        if not (lower <= F_x + slack and F_x <= upper + slack):
            raise InstanceError("relative smoothness violated: lower {!r}, F {!r}, upper {!r}.".format(lower, F_x, upper))

    return True


def save_instance(instance, path):
    spec, objective = instance.spec, instance.objective

    data = {"format_version": FORMAT_VERSION,
            "family": spec.family.value,
            "m": spec.m,
            "n": spec.n,
            "seed": spec.seed,
            "reg": instance.problem.reg.to_dict(),
            "L": objective.rel_smooth_L,
            "path": spec.path,
            "unit_norm": spec.unit_norm,
            "A": objective.A.tolist(),
            "b": None if objective.b is None else objective.b.tolist(),
            "x0": instance.x0.tolist(),
            "x_true": None if instance.x_true is None else instance.x_true.tolist()}

    with open(path, "w") as file:
        json.dump(data, file)

    logger.info("saved %s instance to '%s'.", spec.family.value, path)


def load_instance(path):
    with open(path, "r") as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as error:
            raise InstanceError("'{}' is not valid JSON: {}".format(path, error)) from None

    try:
        if data["format_version"] != FORMAT_VERSION:
            raise InstanceError("unsupported instance format version: {}.".format(data["format_version"]))

        family = InstanceSpec.FAMILY(data["family"])
        reg = Regularizer.from_dict(data["reg"])
        spec = InstanceSpec(family, int(data["m"]), int(data["n"]), data["seed"], reg, data["path"], data["unit_norm"])

        A = np.array(data["A"], dtype=float)
        b = None if data["b"] is None else np.array(data["b"], dtype=float)
        x0 = np.array(data["x0"], dtype=float)
        x_true = None if data["x_true"] is None else np.array(data["x_true"], dtype=float)
        L = float(data["L"])
    except (KeyError, TypeError, ValueError) as error:
        raise InstanceError("'{}' is not a valid instance file: {!r}".format(path, error)) from None

    F = InstanceSpec.FAMILY

    if family in (F.DOPT_RANDOM, F.DOPT_LIBSVM):
        objective = Objective(Objective.KIND.D_OPTIMAL, A, rel_smooth_L=L)
        problem = CompositeProblem(objective,
                                   BregmanKernel(BregmanKernel.KIND.BURG_ENTROPY, objective.n),
                                   FEASIBLE_SET.SIMPLEX,
                                   reg)
    else:
        kind, kernel_kind = {F.POISSON_RANDOM    : (Objective.KIND.POISSON_KL, BregmanKernel.KIND.BURG_ENTROPY),
                             F.RELENTROPY_RANDOM : (Objective.KIND.REL_ENTROPY, BregmanKernel.KIND.SHANNON_ENTROPY),
                             F.LEAST_SQUARES     : (Objective.KIND.LEAST_SQUARES, BregmanKernel.KIND.SQUARED_EUCLIDEAN)}[family]

        problem = _orthant_problem(Objective(kind, A, b, rel_smooth_L=L), kernel_kind, reg)

    if x0.shape != (problem.dimension,):
        raise InstanceError("x0 has shape {}, but the problem lives in R^{}.".format(x0.shape, problem.dimension))

    logger.info("loaded %s instance from '%s'.", family.value, path)

    return Instance(spec, problem, x0, x_true)
