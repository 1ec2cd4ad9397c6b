"""Smooth loss terms ``g`` with value and gradient."""

import numpy as np
from scipy.special import expit

from .numerics import DenseMatrix, LinearOperator

__all__ = ["SmoothOracle", "LeastSquares", "Logistic", "StudentT"]


def _as_operator(A):
    return A if isinstance(A, LinearOperator) else DenseMatrix(A)


class SmoothOracle:
    """Interface for the smooth term. Subclasses set ``n`` and implement
    :meth:`value_grad`."""

    n = 0

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.n:
            raise ValueError(f"expected vector of length {self.n}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite input to smooth oracle")
        return x

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]

    def value_grad(self, x):
        raise NotImplementedError


class LeastSquares(SmoothOracle):
    """``g(x) = ||Ax - b||^2`` (no one-half factor)."""

    def __init__(self, A, b):
        self.A = _as_operator(A)
        self.b = np.asarray(b, dtype=float)
        if self.b.shape != (self.A.rows,):
            raise ValueError("b must have one entry per row of A")
        self.n = self.A.cols

    def value(self, x):
        r = self.A.matvec(self._check(x)) - self.b
        return float(r @ r)

    def grad(self, x):
        r = self.A.matvec(self._check(x)) - self.b
        return 2.0 * self.A.rmatvec(r)

    def value_grad(self, x):
        r = self.A.matvec(self._check(x)) - self.b
        return float(r @ r), 2.0 * self.A.rmatvec(r)


class Logistic(SmoothOracle):
    """``g(x) = sum_i log(1 + exp(-b_i a_i^T x))`` with labels ``b_i`` in {-1, +1}.

    Rows ``a_i`` are the rows of the operator ``A``. Evaluation goes through
    ``logaddexp(0, -z)`` which branches on the sign of ``z`` and so never
    overflows.
    """

    def __init__(self, A, labels):
        self.A = _as_operator(A)
        self.labels = np.asarray(labels, dtype=float)
        if self.labels.shape != (self.A.rows,):
            raise ValueError("one label per row required")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("labels must be -1 or +1")
        self.n = self.A.cols

    def value(self, x):
        z = self.labels * self.A.matvec(self._check(x))
        return float(np.sum(np.logaddexp(0.0, -z)))

    def value_grad(self, x):
        z = self.labels * self.A.matvec(self._check(x))
        val = float(np.sum(np.logaddexp(0.0, -z)))
        return val, self.A.rmatvec(-self.labels * expit(-z))


class StudentT(SmoothOracle):
    """``g(x) = sum_i log(1 + r_i^2 / nu)`` with ``r = Ax - b``; nonconvex."""

    def __init__(self, A, b, nu=0.001):
        if not nu > 0:
            raise ValueError("nu must be positive")
        self.A = _as_operator(A)
        self.b = np.asarray(b, dtype=float)
        if self.b.shape != (self.A.rows,):
            raise ValueError("b must have one entry per row of A")
        self.nu = float(nu)
        self.n = self.A.cols

    def value(self, x):
        r = self.A.matvec(self._check(x)) - self.b
        return float(np.sum(np.log1p(r * r / self.nu)))

    def value_grad(self, x):
        r = self.A.matvec(self._check(x)) - self.b
        val = float(np.sum(np.log1p(r * r / self.nu)))
        return val, self.A.rmatvec(2.0 * r / (self.nu + r * r))
