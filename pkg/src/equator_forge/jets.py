"""Second-order Taylor data (2-jets) for scalar and matrix fields.

Everything downstream that needs derivatives of a metric in a chart --
Christoffel symbols, curvature, mean curvature of equators -- is built from
closed-form 2-jets.  A :class:`ScalarJet` carries ``(value, grad, hess)`` of a
scalar function at a point; a :class:`MatrixJet` carries the same for a
matrix-valued function.  Arithmetic combines jets by the product, quotient and
chain rules, so no finite differencing enters the main code paths (finite
differences are kept for cross-checks in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ScalarJet", "MatrixJet", "constant_jet", "quadratic_scalar_jet", "quadratic_matrix_jet"]


@dataclass(frozen=True)
class ScalarJet:
    """Value, gradient (q,) and Hessian (q, q) of a scalar field at a point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    def _chain(self, f0: float, f1: float, f2: float) -> "ScalarJet":
        """Jet of ``f(self)`` given ``f, f', f''`` evaluated at ``self.value``."""
        grad = f1 * self.grad
        hess = f1 * self.hess + f2 * np.outer(self.grad, self.grad)
        return ScalarJet(f0, grad, hess)

    def __add__(self, other):
        if isinstance(other, ScalarJet):
            return ScalarJet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return ScalarJet(self.value + other, self.grad.copy(), self.hess.copy())

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ScalarJet) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ScalarJet):
            value = self.value * other.value
            grad = self.grad * other.value + self.value * other.grad
            cross = np.outer(self.grad, other.grad)
            hess = self.hess * other.value + self.value * other.hess + cross + cross.T
            return ScalarJet(value, grad, hess)
        return ScalarJet(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarJet):
            return self * other.power(-1.0)
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.power(-1.0) * other

    def power(self, a: float) -> "ScalarJet":
        v = self.value
        return self._chain(v**a, a * v ** (a - 1.0), a * (a - 1.0) * v ** (a - 2.0))

    def log(self) -> "ScalarJet":
        v = self.value
        return self._chain(np.log(v), 1.0 / v, -1.0 / v**2)

    def exp(self) -> "ScalarJet":
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def sqrt(self) -> "ScalarJet":
        return self.power(0.5)


def constant_jet(value: float, nvars: int) -> ScalarJet:
    return ScalarJet(float(value), np.zeros(nvars), np.zeros((nvars, nvars)))


def quadratic_scalar_jet(c0: float, c1: np.ndarray, c2: np.ndarray, x: np.ndarray) -> ScalarJet:
    """Exact jet of the quadratic ``c0 + c1.x + x.c2.x / 2`` (``c2`` symmetric)."""
    value = c0 + c1 @ x + 0.5 * x @ c2 @ x
    return ScalarJet(value, c1 + c2 @ x, c2.copy())


@dataclass(frozen=True)
class MatrixJet:
    """Value (m, m), gradient (q, m, m) and Hessian (q, q, m, m) of a matrix field.

    ``grad[a]`` is the derivative along coordinate ``a``; ``hess`` is symmetric
    in its first two axes.  The matrix dimension m is independent of the number
    of chart variables q.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        return MatrixJet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    def scaled(self, s: ScalarJet) -> "MatrixJet":
        """Jet of ``s(x) * M(x)`` for a scalar jet ``s``."""
        value = s.value * self.value
        grad = s.value * self.grad + s.grad[:, None, None] * self.value
        hess = (
            s.value * self.hess
            + s.hess[:, :, None, None] * self.value
            + s.grad[:, None, None, None] * self.grad[None, :, :, :]
            + s.grad[None, :, None, None] * self.grad[:, None, :, :]
        )
        return MatrixJet(value, grad, hess)

    def det(self) -> ScalarJet:
        """Jet of ``det M`` via Jacobi's formula; requires ``M`` invertible."""
        d = float(np.linalg.det(self.value))
        B = np.linalg.inv(self.value)
        q = self.nvars
        # d log det = tr(B dM);  dd log det = tr(B ddM) - tr(B dM B dM)
        glog = np.einsum("ij,aji->a", B, self.grad)
        BdM = np.einsum("ij,ajk->aik", B, self.grad)
        hlog = np.einsum("ij,abji->ab", B, self.hess) - np.einsum("aij,bji->ab", BdM, BdM)
        grad = d * glog
        hess = d * (hlog + np.outer(glog, glog))
        return ScalarJet(d, grad, hess)

    def logdet(self) -> ScalarJet:
        d = float(np.linalg.det(self.value))
        B = np.linalg.inv(self.value)
        glog = np.einsum("ij,aji->a", B, self.grad)
        BdM = np.einsum("ij,ajk->aik", B, self.grad)
        hlog = np.einsum("ij,abji->ab", B, self.hess) - np.einsum("aij,bji->ab", BdM, BdM)
        return ScalarJet(np.log(d), glog, hlog)


def quadratic_matrix_jet(A0: np.ndarray, A1: np.ndarray, A2: np.ndarray, x: np.ndarray) -> MatrixJet:
    """Exact jet at ``x`` of ``A(x) = A0 + sum_a x_a A1[a] + sum_ab x_a x_b A2[a,b] / 2``.

    ``A2`` must be symmetric in its first two axes (it is the constant second
    derivative of ``A``).
    """
    value = A0 + np.einsum("a,aij->ij", x, A1) + 0.5 * np.einsum("a,b,abij->ij", x, x, A2)
    grad = A1 + np.einsum("b,abij->aij", x, A2)
    return MatrixJet(value, grad, A2.copy())
