"""Closed-form scalar functions of one variable, jet-evaluable to any order.

An expression tree over the jet primitive set is the working representation
for potentials, operator coefficients and mass functions. Two extra node
kinds cover everything the construction needs:

* ``CallableFn`` wraps any ``(q0, order) -> Jet`` evaluator, so numerically
  defined quantities (gauge potentials, extracted effective potentials)
  plug into the same machinery as closed forms.
* ``Antiderivative`` represents an indefinite integral anchored at a point:
  the value comes from adaptive quadrature, higher Taylor coefficients from
  the integrand's jet.

Also here: the mass-profile catalog (pairs m(q), u(q) with u' = sqrt(m)),
and the effective potential of the symmetrically ordered kinetic operator
with ordering parameters (alpha, gamma).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import BadParams, NonPositiveMass
from .jets import Jet

_PI = 3.141592653589793


class ScalarFunction:
    """Base class: anything evaluable to a Jet at a non-singular point."""

    singular_points: tuple = ()

    def eval_jet(self, q0: complex, order: int) -> Jet:
        raise NotImplementedError

    def __call__(self, q0: complex) -> complex:
        return self.eval_jet(q0, 0).value

    # operators build new trees; numbers are lifted to constants
    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __neg__(self):
        return Mul(Const(-1.0), self)

    def __pow__(self, n):
        if isinstance(n, int):
            return PowInt(self, n)
        return PowReal(self, complex(n))


def _lift(x) -> ScalarFunction:
    if isinstance(x, ScalarFunction):
        return x
    return Const(complex(x))


class Const(ScalarFunction):
    def __init__(self, value: complex):
        self.value = complex(value)

    def eval_jet(self, q0, order):
        return jets.jet_const(self.value, order, q0)


class Var(ScalarFunction):
    def eval_jet(self, q0, order):
        return jets.jet_variable(q0, order)


class _Binary(ScalarFunction):
    def __init__(self, a: ScalarFunction, b: ScalarFunction):
        self.a = a
        self.b = b
        self.singular_points = tuple(a.singular_points) + tuple(b.singular_points)


class Add(_Binary):
    def eval_jet(self, q0, order):
        return self.a.eval_jet(q0, order) + self.b.eval_jet(q0, order)


class Sub(_Binary):
    def eval_jet(self, q0, order):
        return self.a.eval_jet(q0, order) - self.b.eval_jet(q0, order)


class Mul(_Binary):
    def eval_jet(self, q0, order):
        return self.a.eval_jet(q0, order) * self.b.eval_jet(q0, order)


class Div(_Binary):
    def eval_jet(self, q0, order):
        return self.a.eval_jet(q0, order) / self.b.eval_jet(q0, order)


class PowInt(ScalarFunction):
    def __init__(self, a: ScalarFunction, n: int):
        self.a = a
        self.n = n
        self.singular_points = tuple(a.singular_points)

    def eval_jet(self, q0, order):
        return jets.pow_int(self.a.eval_jet(q0, order), self.n)


class PowReal(ScalarFunction):
    def __init__(self, a: ScalarFunction, r: complex):
        self.a = a
        self.r = complex(r)
        self.singular_points = tuple(a.singular_points)

    def eval_jet(self, q0, order):
        return jets.powr(self.a.eval_jet(q0, order), self.r)


class FuncNode(ScalarFunction):
    def __init__(self, name: str, a: ScalarFunction):
        self.name = name
        self.a = a
        self.singular_points = tuple(a.singular_points)

    def eval_jet(self, q0, order):
        return jets.jet_func(self.a.eval_jet(q0, order), self.name)


class SpecialFunction(ScalarFunction):
    """Composition with a named special function given as a jet evaluator.

    `jet_impl(u0, order)` must return the jet of the special function at u0.
    """

    def __init__(self, name: str, jet_impl, a: ScalarFunction,
                 singular_points: tuple = ()):
        self.name = name
        self.jet_impl = jet_impl
        self.a = a
        self.singular_points = tuple(a.singular_points) + tuple(singular_points)

    def eval_jet(self, q0, order):
        inner = self.a.eval_jet(q0, order)
        outer = self.jet_impl(inner.value, order)
        return jets.compose(outer, inner)


class Deriv(ScalarFunction):
    """k-th derivative of another scalar function (through extended jets)."""

    def __init__(self, a: ScalarFunction, k: int = 1):
        self.a = a
        self.k = k
        self.singular_points = tuple(a.singular_points)

    def eval_jet(self, q0, order):
        return self.a.eval_jet(q0, order + self.k).derivative(self.k)


class CallableFn(ScalarFunction):
    """Adapter for an arbitrary ``(q0, order) -> Jet`` evaluator.

    With ``memo=True`` results are cached per (q0, order); safe because jets
    are immutable by convention.
    """

    def __init__(self, fn, name: str = "", memo: bool = False,
                 singular_points: tuple = ()):
        self.fn = fn
        self.name = name
        self.singular_points = tuple(singular_points)
        self._memo: dict | None = {} if memo else None

    def eval_jet(self, q0, order):
        if self._memo is None:
            return self.fn(q0, order)
        key = (complex(q0), order)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.fn(q0, order)
            self._memo[key] = hit
        return hit


# convenience constructors mirroring the primitive set
def var() -> ScalarFunction:
    return Var()


def const(c) -> ScalarFunction:
    return Const(c)


def exp(f) -> ScalarFunction:
    return FuncNode("exp", _lift(f))


def log(f) -> ScalarFunction:
    return FuncNode("ln", _lift(f))


def sqrt(f) -> ScalarFunction:
    return FuncNode("sqrt", _lift(f))


def sin(f) -> ScalarFunction:
    return FuncNode("sin", _lift(f))


def cos(f) -> ScalarFunction:
    return FuncNode("cos", _lift(f))


def sinh(f) -> ScalarFunction:
    return FuncNode("sinh", _lift(f))


def cosh(f) -> ScalarFunction:
    return FuncNode("cosh", _lift(f))


def tanh(f) -> ScalarFunction:
    return FuncNode("tanh", _lift(f))


def arctan(f) -> ScalarFunction:
    """arctan over the complex field via the principal logarithm."""
    f = _lift(f)
    i = Const(1j)
    return Const(-0.5j) * log((1 + i * f) / (1 - i * f))


def eval_jet(f: ScalarFunction, q0: complex, order: int) -> Jet:
    """Free-function form of ScalarFunction.eval_jet."""
    return f.eval_jet(q0, order)


# -- adaptive quadrature -----------------------------------------------------

# Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (positive half; symmetric)
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])


def _gk15(fn, a: complex, b: complex):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.empty(15, dtype=np.complex128)
    for i in range(7):
        vals[i] = fn(mid - half * _XGK[i])
        vals[14 - i] = fn(mid + half * _XGK[i])
    vals[7] = fn(mid)
    kron = _WGK[7] * vals[7]
    gauss = _WG[3] * vals[7]
    for i in range(7):
        pair = vals[i] + vals[14 - i]
        kron += _WGK[i] * pair
        if i % 2 == 1:
            gauss += _WG[i // 2] * pair
    return kron * half, abs((kron - gauss) * half)


def quad(fn, a: complex, b: complex, tol: float = 1e-12,
         max_depth: int = 28) -> complex:
    """Adaptive Gauss-Kronrod integral of a complex-valued function.

    Integration runs along the straight segment from a to b; `tol` is an
    absolute tolerance on the accumulated error estimate.
    """
    if a == b:
        return 0.0 + 0.0j

    def recurse(lo, hi, depth, budget):
        val, err = _gk15(fn, lo, hi)
        if err <= budget or depth >= max_depth:
            return val
        mid = 0.5 * (lo + hi)
        half_budget = 0.5 * budget
        return (recurse(lo, mid, depth + 1, half_budget)
                + recurse(mid, hi, depth + 1, half_budget))

    return recurse(a, b, 0, tol)


class Antiderivative(ScalarFunction):
    """Indefinite integral of a scalar function, anchored at a point.

    Values come from adaptive quadrature (cached per evaluation point and
    reused incrementally between nearby real points); higher Taylor
    coefficients come from the integrand jet, so jets of any order are exact
    up to the quadrature tolerance of the constant term. A lock guards the
    cache so concurrent evaluations do not interfere.
    """

    def __init__(self, integrand: ScalarFunction, anchor: complex,
                 anchor_value: complex = 0.0, tol: float = 1e-12):
        self.integrand = integrand
        self.anchor = complex(anchor)
        self.anchor_value = complex(anchor_value)
        self.tol = tol
        self._cache: dict[complex, complex] = {self.anchor: self.anchor_value}
        self._lock = threading.Lock()
        self.singular_points = tuple(integrand.singular_points)

    def _value(self, q0: complex) -> complex:
        q0 = complex(q0)
        with self._lock:
            hit = self._cache.get(q0)
        if hit is not None:
            return hit
        # integrate from the nearest cached point (shorter adaptive paths)
        with self._lock:
            near = min(self._cache, key=lambda p: abs(p - q0))
            base = self._cache[near]
        val = base + quad(lambda t: self.integrand.eval_jet(t, 0).value,
                          near, q0, self.tol)
        with self._lock:
            self._cache[q0] = val
        return val

    def eval_jet(self, q0, order):
        val = self._value(q0)
        if order == 0:
            return jets.jet_const(val, 0, q0)
        d = self.integrand.eval_jet(q0, order - 1)
        return d.antiderivative(val)


# -- mass profiles -----------------------------------------------------------

@dataclass(frozen=True)
class MassProfile:
    """Pair (m(q), u(q)) with u' = sqrt(m), plus a validity domain.

    `domain` is a real open interval (lo, hi) or None for all of R; `anchor`
    records the point where u was normalized (builtins carry their natural
    closed form, custom profiles integrate sqrt(m) from the anchor).
    """

    m: ScalarFunction
    u: ScalarFunction
    domain: tuple | None
    anchor: complex
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def consistency_residual(self, points) -> float:
        """max |u'(q)^2 - m(q)| / (1 + |m(q)|) over the given points."""
        worst = 0.0
        for q in points:
            up = self.u.eval_jet(q, 1).derivative_value(1)
            mv = self.m.eval_jet(q, 0).value
            worst = max(worst, abs(up * up - mv) / (1.0 + abs(mv)))
        return worst


def _probe_positive(m: ScalarFunction, domain, samples: int = 41) -> None:
    lo, hi = domain if domain else (-5.0, 5.0)
    for q in np.linspace(lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo), samples):
        v = m.eval_jet(complex(q), 0).value
        if abs(v.imag) > 1e-10 * (1.0 + abs(v)) or v.real <= 0.0:
            raise NonPositiveMass(f"m({q}) = {v} is not real positive")


def builtin_mass_profile(name: str, physical: bool = False,
                         domain: tuple | None = None,
                         **params) -> MassProfile:
    """Catalog of mass profiles with closed-form u(q).

    Families: constant(c), exp_scale(alpha), cauchy_sq, sech_like(alpha),
    custom(m=..., anchor=...). For `custom`, u is built by adaptive
    quadrature of sqrt(m) from the anchor; jets of u use u' = sqrt(m).
    """
    q = Var()
    if name == "constant":
        c = complex(params.pop("c", 1.0))
        if params:
            raise BadParams(f"unknown constant-profile params {params}")
        if c == 0:
            raise BadParams("constant profile needs c != 0")
        prof = MassProfile(Const(c * c), Const(c) * q, domain, 0.0,
                           "constant", {"c": c})
    elif name == "exp_scale":
        alpha = complex(params.pop("alpha", 1.0))
        if params:
            raise BadParams(f"unknown exp_scale params {params}")
        if alpha == 0:
            raise BadParams("exp_scale needs alpha != 0")
        prof = MassProfile(exp(2.0 * alpha * q), exp(alpha * q) / alpha,
                           domain, 0.0, "exp_scale", {"alpha": alpha})
    elif name == "cauchy_sq":
        if params:
            raise BadParams(f"unknown cauchy_sq params {params}")
        prof = MassProfile(PowInt(1 + q * q, -2), arctan(q), domain, 0.0,
                           "cauchy_sq", {})
    elif name == "sech_like":
        alpha = complex(params.pop("alpha", 1.0))
        if params:
            raise BadParams(f"unknown sech_like params {params}")
        if alpha == 0:
            raise BadParams("sech_like needs alpha != 0")
        # u is the gudermannian of alpha*q scaled by 1/alpha; u' = sech(alpha q)
        u = (2.0 * arctan(exp(alpha * q)) - Const(_PI / 2)) / alpha
        prof = MassProfile(PowInt(cosh(alpha * q), -2), u, domain, 0.0,
                           "sech_like", {"alpha": alpha})
    elif name == "custom":
        m = params.pop("m", None)
        anchor = complex(params.pop("anchor", 0.0))
        tol = params.pop("tol", 1e-12)
        if params:
            raise BadParams(f"unknown custom params {params}")
        if not isinstance(m, ScalarFunction):
            raise BadParams("custom profile needs m as a ScalarFunction")
        u = Antiderivative(sqrt(m), anchor, 0.0, tol)
        prof = MassProfile(m, u, domain, anchor, "custom", {})
    else:
        raise BadParams(f"unknown mass profile {name!r}")
    if physical:
        _probe_positive(prof.m, prof.domain)
    return prof


def von_roos_effective_potential(V, m, alpha: complex,
                                 gamma: complex) -> ScalarFunction:
    """Effective potential of the symmetrically ordered kinetic operator.

    U = V - (alpha+gamma) m''/4m^2 + (alpha*gamma+alpha+gamma) m'^2/2m^3.
    The third ordering parameter beta = -1 - alpha - gamma is implied by the
    constraint alpha + beta + gamma = -1 and does not enter U.
    """
    mf = m.m if isinstance(m, MassProfile) else _lift(m)
    V = _lift(V)
    alpha = complex(alpha)
    gamma = complex(gamma)
    c1 = alpha + gamma
    c2 = alpha * gamma + alpha + gamma
    m1 = Deriv(mf, 1)
    m2 = Deriv(mf, 2)
    return (V - Const(c1) * m2 / (4 * PowInt(mf, 2))
            + Const(c2) * m1 * m1 / (2 * PowInt(mf, 3)))
