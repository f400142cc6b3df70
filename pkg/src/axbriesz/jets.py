"""Truncated Taylor arithmetic (forward-mode automatic differentiation).

A :class:`Jet` carries the Taylor coefficients ``c[0..K]`` of a function at a
point, so ``c[k] * k!`` is the k-th derivative.  Coefficient arrays may carry
trailing batch dimensions, which lets a single jet evaluate many points at
once.  This is the nested-dual-number construction collapsed into one
object: propagating a jet through an expression costs O(K^2) per operation
and is exact up to floating point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np


@dataclass(frozen=True)
class Jet:
    c: np.ndarray

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        """The identity function expanded at ``x0``."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    def derivative(self, k: int) -> np.ndarray:
        return self.c[k] * factorial(k)

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(np.broadcast_to(other, self.c.shape[1:]), self.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c)
        c = self.c.copy()
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self.c, other.c
        K = self.order
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(K + 1):
            for i in range(k + 1):
                out[k] = out[k] + a[i] * b[k - i]
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        K = self.order
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, K + 1):
            acc = np.zeros_like(a[0])
            for i in range(1, k + 1):
                acc = acc + a[i] * out[k - i]
            out[k] = -acc / a[0]
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def shift(self) -> "Jet":
        """Derivative of the expanded function, as a jet of one lower order."""
        K = self.order
        k = np.arange(1, K + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)


def _compose(a: Jet, f0, fprime_jet) -> Jet:
    """Solve b' = f'(a) a' for b = f(a), given a routine returning f'(a)."""
    K = a.order
    out = np.zeros_like(a.c)
    out[0] = f0
    if K == 0:
        return Jet(out)
    # f'(a) only needs order K-1, but building it at full order is simpler.
    g = fprime_jet.c
    for k in range(1, K + 1):
        acc = np.zeros_like(a.c[0])
        for i in range(1, k + 1):
            acc = acc + i * a.c[i] * g[k - i]
        out[k] = acc / k
    return Jet(out)


def exp(a: Jet) -> Jet:
    K = a.order
    out = np.zeros_like(a.c)
    out[0] = np.exp(a.c[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(a.c[0])
        for i in range(1, k + 1):
            acc = acc + i * a.c[i] * out[k - i]
        out[k] = acc / k
    return Jet(out)


def log(a: Jet) -> Jet:
    return _compose(a, np.log(a.c[0]), a.reciprocal())


def log1p(a: Jet) -> Jet:
    """log(1 + a), accurate when the constant term of ``a`` is tiny."""
    return _compose(a, np.log1p(a.c[0]), (a + 1.0).reciprocal())


def sqrt(a: Jet) -> Jet:
    K = a.order
    out = np.zeros_like(a.c)
    out[0] = np.sqrt(a.c[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(a.c[0])
        for i in range(1, k):
            acc = acc + out[i] * out[k - i]
        out[k] = (a.c[k] - acc) / (2.0 * out[0])
    return Jet(out)


def power(a: Jet, p: float) -> Jet:
    """a**p for real p, assuming a positive constant term."""
    K = a.order
    out = np.zeros_like(a.c)
    out[0] = a.c[0] ** p
    for k in range(1, K + 1):
        acc = np.zeros_like(a.c[0])
        for i in range(1, k + 1):
            acc = acc + (p * i - (k - i)) * a.c[i] * out[k - i]
        out[k] = acc / (k * a.c[0])
    return Jet(out)


def sinh_cosh(a: Jet) -> tuple[Jet, Jet]:
    K = a.order
    s = np.zeros_like(a.c)
    c = np.zeros_like(a.c)
    s[0] = np.sinh(a.c[0])
    c[0] = np.cosh(a.c[0])
    for k in range(1, K + 1):
        acc_s = np.zeros_like(a.c[0])
        acc_c = np.zeros_like(a.c[0])
        for i in range(1, k + 1):
            acc_s = acc_s + i * a.c[i] * c[k - i]
            acc_c = acc_c + i * a.c[i] * s[k - i]
        s[k] = acc_s / k
        c[k] = acc_c / k
    return Jet(s), Jet(c)
