"""Truncated Taylor-series (jet) arithmetic over the complex field.

A jet holds the scaled Taylor coefficients c[k] = f^(k)(q0)/k! of a function
at a base point. Arithmetic and the primitive functions propagate the full
coefficient vector, so applying a high-order differential operator to a
closed-form function reduces to ordinary jet evaluations. Coefficients are
stored scaled (not raw derivatives) to keep orders up to ~14 well inside the
double-precision range.

All operations are pure: jets are never mutated after construction, which
makes them freely shareable between threads.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from ._backend import kernels
from .errors import OrderTooLow, SingularJet

#: primitives reject base values closer than this to their singular point
SINGULAR_FLOOR = 1e-12


class Jet:
    """Truncated Taylor expansion of a scalar function at one point.

    Attributes:
        base: the expansion point q0.
        coeffs: complex128 array, entry k equals f^(k)(q0)/k!.
    """

    __slots__ = ("base", "coeffs")

    def __init__(self, base: complex, coeffs: Iterable[complex]):
        self.base = complex(base)
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValueError("jet needs a non-empty 1-D coefficient vector")
        self.coeffs = arr

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> complex:
        return complex(self.coeffs[0])

    def derivative_value(self, k: int) -> complex:
        """Raw derivative f^(k)(q0); requires k <= order."""
        if k > self.order:
            raise OrderTooLow(f"jet of order {self.order} has no derivative {k}")
        return complex(self.coeffs[k]) * math.factorial(k)

    def derivative(self, times: int = 1) -> "Jet":
        """Jet of f^(times); drops `times` orders."""
        c = self.coeffs
        for _ in range(times):
            if c.shape[0] < 2:
                raise OrderTooLow("cannot differentiate an order-0 jet")
            n = c.shape[0]
            c = c[1:] * np.arange(1, n)
        return Jet(self.base, c)

    def antiderivative(self, value: complex = 0.0) -> "Jet":
        """Jet of the antiderivative with given value at the base point."""
        n = self.coeffs.shape[0]
        out = np.empty(n + 1, dtype=np.complex128)
        out[0] = value
        out[1:] = self.coeffs / np.arange(1, n + 1)
        return Jet(self.base, out)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderTooLow(f"cannot extend order {self.order} to {order}")
        return Jet(self.base, self.coeffs[:order + 1])

    def __repr__(self) -> str:
        return f"Jet(base={self.base}, coeffs={list(self.coeffs)})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise OrderTooLow(
                    f"jet order mismatch: {self.order} vs {other.order}")
            if abs(other.base - self.base) > 1e-12 * (1.0 + abs(self.base)):
                raise ValueError("jets have different base points")
            return other
        return jet_const(other, self.order, self.base)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet(self.base, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet(self.base, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        return Jet(self.base, o.coeffs - self.coeffs)

    def __neg__(self):
        return Jet(self.base, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            o = self._coerce(other)
            return Jet(self.base, kernels.mul(self.coeffs, o.coeffs))
        return Jet(self.base, self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.base, self.coeffs / complex(other))
        o = self._coerce(other)
        _check_nonzero(o, "division")
        return Jet(self.base, kernels.div(self.coeffs, o.coeffs))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("use powr() for non-integer exponents")
        return pow_int(self, n)


def jet_variable(q0: complex, order: int) -> Jet:
    """Jet of the identity function f(q) = q at q0."""
    if order < 0:
        raise ValueError("order must be >= 0")
    c = np.zeros(order + 1, dtype=np.complex128)
    c[0] = q0
    if order >= 1:
        c[1] = 1.0
    return Jet(q0, c)


def jet_const(value: complex, order: int, base: complex = 0.0) -> Jet:
    """Jet of a constant function."""
    c = np.zeros(order + 1, dtype=np.complex128)
    c[0] = value
    return Jet(base, c)


def _check_nonzero(a: Jet, what: str) -> None:
    if abs(a.coeffs[0]) < SINGULAR_FLOOR:
        raise SingularJet(f"{what} at base value {a.coeffs[0]} below floor")


# -- primitive functions ---------------------------------------------------

def exp(a: Jet) -> Jet:
    return Jet(a.base, kernels.exp_(a.coeffs))


def log(a: Jet) -> Jet:
    _check_nonzero(a, "log")
    return Jet(a.base, kernels.log_(a.coeffs))


def sqrt(a: Jet) -> Jet:
    _check_nonzero(a, "sqrt")
    return Jet(a.base, kernels.sqrt_(a.coeffs))


def recip(a: Jet) -> Jet:
    _check_nonzero(a, "reciprocal")
    one = np.zeros_like(a.coeffs)
    one[0] = 1.0
    return Jet(a.base, kernels.div(one, a.coeffs))


def powr(a: Jet, r: complex) -> Jet:
    """Principal-branch power a^r for arbitrary complex exponent."""
    _check_nonzero(a, "pow")
    return Jet(a.base, kernels.powr(a.coeffs, complex(r)))


def pow_int(a: Jet, n: int) -> Jet:
    if n == 0:
        return jet_const(1.0, a.order, a.base)
    if n < 0:
        return recip(pow_int(a, -n))
    result = a
    n -= 1
    square = a
    while n:
        if n & 1:
            result = result * square
        n >>= 1
        if n:
            square = square * square
    return result


def sin(a: Jet) -> Jet:
    s, _ = kernels.sin_cos(a.coeffs)
    return Jet(a.base, s)


def cos(a: Jet) -> Jet:
    _, c = kernels.sin_cos(a.coeffs)
    return Jet(a.base, c)


def sinh(a: Jet) -> Jet:
    s, _ = kernels.sinh_cosh(a.coeffs)
    return Jet(a.base, s)


def cosh(a: Jet) -> Jet:
    _, c = kernels.sinh_cosh(a.coeffs)
    return Jet(a.base, c)


def tanh(a: Jet) -> Jet:
    s, c = kernels.sinh_cosh(a.coeffs)
    if abs(c[0]) < SINGULAR_FLOOR:
        raise SingularJet("tanh at a pole of 1/cosh")
    return Jet(a.base, kernels.div(s, c))


def compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of f(g(q)) from outer = jet of f at g(q0) and inner = jet of g.

    The constant term of `inner` must equal the base point of `outer`.
    """
    if abs(inner.coeffs[0] - outer.base) > 1e-9 * (1.0 + abs(outer.base)):
        raise ValueError("inner jet value does not match outer base point")
    if inner.order != outer.order:
        raise OrderTooLow("compose needs matching jet orders")
    shifted = inner.coeffs.copy()
    shifted[0] = 0.0
    return Jet(inner.base, kernels.compose(outer.coeffs, shifted))


# -- name-dispatched wrappers ----------------------------------------------

_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}

_UNARY = {
    "exp": exp,
    "ln": log,
    "log": log,
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "recip": recip,
}


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    """Binary arithmetic by name: op in {add, sub, mul, div}."""
    try:
        fn = _BINARY[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    return fn(a, b)


def jet_func(a: Jet, f: str, r: complex | None = None) -> Jet:
    """Primitive function by name; 'pow_r' takes the exponent in `r`."""
    if f == "pow_r":
        if r is None:
            raise ValueError("pow_r needs an exponent")
        return powr(a, r)
    try:
        fn = _UNARY[f]
    except KeyError:
        raise ValueError(f"unknown jet primitive {f!r}") from None
    return fn(a)
