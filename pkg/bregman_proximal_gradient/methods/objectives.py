#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from ..assisting_modules.errors import ConfigurationError, DomainError
from .kernels import BregmanKernel

import enum

import numpy as np
from scipy import linalg, special


class Regularizer:
    """The simple convex term Psi of the composite objective F = f + Psi."""

    class KIND(enum.Enum):
        ZERO = "zero"
        L1 = "l1"
        SQUARED_L2 = "l2"

    def __init__(self, kind=KIND.ZERO, lam=0.0):
        assert isinstance(kind, self.__class__.KIND), "'kind' must be a member of 'Regularizer.KIND'."

        if lam < 0:
            raise ConfigurationError("the regularization weight must be nonnegative, but found: {}.".format(lam))

        self.kind = kind

        # The weight is meaningless for 'KIND.ZERO', so it is normalized to keep equality and serialization simple.
        self.lam = 0.0 if (kind == self.__class__.KIND.ZERO) else float(lam)

    def __repr__(self):
        return "{}(kind='{}', lam='{}')".format(self.__class__.__name__, self.kind.value, self.lam)

    def __eq__(self, other):
        return isinstance(other, Regularizer) and (self.kind, self.lam) == (other.kind, other.lam)

    def __hash__(self):
        return hash((self.kind, self.lam))

    @classmethod
    def zero(cls):
        return cls(cls.KIND.ZERO)

    @classmethod
    def l1(cls, lam):
        return cls(cls.KIND.L1, lam)

    @classmethod
    def squared_l2(cls, lam):
        return cls(cls.KIND.SQUARED_L2, lam)

    @classmethod
    def from_name(cls, name, lam=0.0):
        for member in cls.KIND:
            if name in (member.value, member.name, member.name.lower()):
                return cls(member, lam)

        raise ConfigurationError("unrecognized regularizer: {}.".format(name))

    def to_dict(self):
        return {"kind": self.kind.value, "lam": self.lam}

    @classmethod
    def from_dict(cls, data):
        return cls.from_name(data["kind"], data.get("lam", 0.0))

    def value(self, x):
        if self.kind == self.__class__.KIND.ZERO:
            return 0.0

        x = np.asarray(x, dtype=float)

        if self.kind == self.__class__.KIND.L1:
            return self.lam * float(np.sum(np.abs(x)))

        return 0.5 * self.lam * float(np.dot(x, x))


class Objective:
    """The smooth part f of the composite objective, with its gradient and a relative-smoothness constant L with respect
    to the paired kernel."""

    _SHAPE_ERR_MSG = "shape {} was expected for {}, but found: {}."

    class KIND(enum.Enum):
        D_OPTIMAL = "dopt"
        POISSON_KL = "poisson"
        REL_ENTROPY = "relentropy"
        LEAST_SQUARES = "leastsq"

    # The kernel relative to which 'rel_smooth_L' is valid.
    _PAIRED_KERNEL = {KIND.D_OPTIMAL     : BregmanKernel.KIND.BURG_ENTROPY,
                      KIND.POISSON_KL    : BregmanKernel.KIND.BURG_ENTROPY,
                      KIND.REL_ENTROPY   : BregmanKernel.KIND.SHANNON_ENTROPY,
                      KIND.LEAST_SQUARES : BregmanKernel.KIND.SQUARED_EUCLIDEAN}

    def __init__(self, kind, A, b=None, *, rel_smooth_L=None):
        assert isinstance(kind, self.__class__.KIND), "'kind' must be a member of 'Objective.KIND'."

        self.kind = kind

        # For D-optimal design, 'A' holds the design vectors v_i as its columns.
        self.A = np.array(A, dtype=float)
        self.b = None if (b is None) else np.array(b, dtype=float)

        if self.A.ndim != 2:
            raise ConfigurationError("the data matrix must be two-dimensional, but found shape {}.".format(self.A.shape))

        self.m, self.n = self.A.shape

        self._validate()

        default_L = self._default_rel_smooth_L()

        if rel_smooth_L is None:
            rel_smooth_L = default_L

        elif rel_smooth_L < default_L:
            raise ConfigurationError("L = {} is below the guaranteed relative-smoothness constant {}.".format(rel_smooth_L,
                                                                                                          default_L))

        self.rel_smooth_L = float(rel_smooth_L)

    def __repr__(self):
        return "{}(kind='{}', m='{}', n='{}', L='{}')".format(self.__class__.__name__,
                                                              self.kind.value,
                                                              self.m,
                                                              self.n,
                                                              self.rel_smooth_L)

    @classmethod
    def d_optimal(cls, V):
        return cls(cls.KIND.D_OPTIMAL, V)

    @classmethod
    def poisson_kl(cls, A, b, *, rel_smooth_L=None):
        return cls(cls.KIND.POISSON_KL, A, b, rel_smooth_L=rel_smooth_L)

    @classmethod
    def rel_entropy(cls, A, b, *, rel_smooth_L=None):
        return cls(cls.KIND.REL_ENTROPY, A, b, rel_smooth_L=rel_smooth_L)

    @classmethod
    def least_squares(cls, A, b, *, rel_smooth_L=None):
        return cls(cls.KIND.LEAST_SQUARES, A, b, rel_smooth_L=rel_smooth_L)

    @property
    def paired_kernel_kind(self):
        return self.__class__._PAIRED_KERNEL[self.kind]

    def _validate(self):
        K = self.__class__.KIND

        if self.kind == K.D_OPTIMAL:
            if self.n < self.m + 1:
                raise ConfigurationError("D-optimal design needs n >= m + 1, but found m = {} and n = {}.".format(self.m,
                                                                                                                 self.n))

            if np.linalg.matrix_rank(self.A) < self.m:
                raise ConfigurationError("the design vectors do not span R^{}.".format(self.m))

            return

        if (self.b is None) or (self.b.shape != (self.m,)):
            raise ConfigurationError(self.__class__._SHAPE_ERR_MSG.format((self.m,),
                                                                         "'b'",
                                                                         None if self.b is None else self.b.shape))

        if self.kind in (K.POISSON_KL, K.REL_ENTROPY):
            if self.A.min() < 0:
                raise ConfigurationError("the observation matrix must be nonnegative.")

            if self.b.min() <= 0:
                raise ConfigurationError("the measurements must be strictly positive.")

            # A zero row would make (Ax)_i = 0 for every x, which leaves f undefined or its gradient infinite.
            zero_rows = np.nonzero(~self.A.any(axis=1))[0]

            if zero_rows.size:
                raise ConfigurationError("row {} of the observation matrix is zero.".format(int(zero_rows[0])))

    def _default_rel_smooth_L(self):
        K = self.__class__.KIND

        if self.kind == K.D_OPTIMAL:
            return 1.0

        if self.kind == K.POISSON_KL:
            return float(np.sum(self.b))

        if self.kind == K.REL_ENTROPY:
            return float(self.A.sum(axis=0).max())

        return float(linalg.svdvals(self.A)[0] ** 2)

    def _vector(self, x):
        x = np.asarray(x, dtype=float)

        assert (x.shape == (self.n,)), self.__class__._SHAPE_ERR_MSG.format((self.n,), "'x'", x.shape)

        return x

    def _moment_factor(self, x):
        if x.min() < 0:
            i = int(np.argmin(x))
            raise DomainError("design weights must be nonnegative (coordinate {} is {!r}).".format(i, x[i]), coordinate=i)

        H = np.dot(self.A * x, self.A.T)

        try:
            return linalg.cho_factor(H, lower=True, check_finite=False)
        except linalg.LinAlgError:
            raise DomainError("the weighted moment matrix is not positive definite.") from None

    def _positive_image(self, x, *, allow_zero=False):
        Ax = np.dot(self.A, x)
        bad = (Ax < 0) if allow_zero else (Ax <= 0)

        if bad.any():
            i = int(np.argmax(bad))
            raise DomainError("(Ax)_{} = {!r} leaves the domain of f.".format(i, Ax[i]), coordinate=i)

        return Ax

    def value(self, x):
        x = self._vector(x)
        K = self.__class__.KIND

        if self.kind == K.D_OPTIMAL:
            factor, _ = self._moment_factor(x)
            return -2.0 * float(np.sum(np.log(np.diag(factor))))

        if self.kind == K.POISSON_KL:
            return float(np.sum(special.kl_div(self.b, self._positive_image(x))))

        if self.kind == K.REL_ENTROPY:
            return float(np.sum(special.kl_div(self._positive_image(x, allow_zero=True), self.b)))

        residual = np.dot(self.A, x) - self.b
        return 0.5 * float(np.dot(residual, residual))

    def gradient(self, x):
        x = self._vector(x)
        K = self.__class__.KIND

        if self.kind == K.D_OPTIMAL:
            # The i-th coordinate is -v_i^T H(x)^{-1} v_i. A single solve with all columns at once is used.
            factor = self._moment_factor(x)
            return -np.sum(self.A * linalg.cho_solve(factor, self.A, check_finite=False), axis=0)

        if self.kind == K.POISSON_KL:
            return np.dot(self.A.T, 1.0 - self.b / self._positive_image(x))

        if self.kind == K.REL_ENTROPY:
            return np.dot(self.A.T, np.log(self._positive_image(x) / self.b))

        return np.dot(self.A.T, np.dot(self.A, x) - self.b)
