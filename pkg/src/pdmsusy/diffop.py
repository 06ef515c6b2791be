"""Linear differential operators with function coefficients.

Operators act on jets: applying an operator of order m to a jet of order K
yields a jet of order K - m, so compositions nest without any symbolic
expansion. Composition and transposition are therefore represented lazily
(an operator DAG); explicit coefficient jets can still be recovered through
`coeff_jets`, which expands the DAG by Leibniz's rule at one point.

`annihilator_from_basis` builds the monic-core operator whose kernel is the
span of a given function basis, realized through Wronskian determinants of
jets, with partial pivoting in the jet-valued Gaussian elimination.
"""

from __future__ import annotations

import math

import numpy as np

from . import jets
from .errors import DegenerateBasis, OrderTooLow
from .jets import Jet
from .scalarfn import CallableFn, ScalarFunction


class DiffOperator:
    """Base class. Subclasses define `order`, `apply_jet`, `transpose`."""

    order: int = 0

    def apply_jet(self, f: Jet) -> Jet:
        raise NotImplementedError

    def transpose(self) -> "DiffOperator":
        raise NotImplementedError

    def __call__(self, f: Jet) -> Jet:
        return self.apply_jet(f)

    def _check(self, f: Jet) -> int:
        out = f.order - self.order
        if out < 0:
            raise OrderTooLow(
                f"operator of order {self.order} needs a jet of order "
                f">= {self.order}, got {f.order}")
        return out


def _coeff_jet(c, q0: complex, order: int) -> Jet:
    if isinstance(c, ScalarFunction):
        return c.eval_jet(q0, order)
    return jets.jet_const(c, order, q0)


class LinearDiffOp(DiffOperator):
    """Sum_k c_k(q) d^k/dq^k with jet-evaluable coefficients.

    `coeffs[k]` multiplies the k-th derivative; entries may be scalars,
    ScalarFunctions, or anything with eval_jet.
    """

    def __init__(self, coeffs):
        if not coeffs:
            raise ValueError("need at least one coefficient")
        self.coeffs = list(coeffs)
        self.order = len(self.coeffs) - 1

    def apply_jet(self, f: Jet) -> Jet:
        out = self._check(f)
        q0 = f.base
        acc = jets.jet_const(0.0, out, q0)
        d = f
        for k, c in enumerate(self.coeffs):
            if k > 0:
                d = d.derivative()
            acc = acc + _coeff_jet(c, q0, out) * d.truncate(out)
        return acc

    def transpose(self) -> DiffOperator:
        return TransposedOp(self)

    def coeff_jets(self, q0: complex, order: int) -> list[Jet]:
        return [_coeff_jet(c, q0, order) for c in self.coeffs]


class MultiplyOp(DiffOperator):
    """Order-0 operator: multiplication by a scalar function."""

    order = 0

    def __init__(self, factor):
        self.factor = factor

    def apply_jet(self, f: Jet) -> Jet:
        return _coeff_jet(self.factor, f.base, f.order) * f

    def transpose(self) -> DiffOperator:
        return self

    def coeff_jets(self, q0, order):
        return [_coeff_jet(self.factor, q0, order)]


class ComposedOp(DiffOperator):
    """Lazy composition a(b(.)); order adds."""

    def __init__(self, a: DiffOperator, b: DiffOperator):
        self.a = a
        self.b = b
        self.order = a.order + b.order

    def apply_jet(self, f: Jet) -> Jet:
        self._check(f)
        return self.a.apply_jet(self.b.apply_jet(f))

    def transpose(self) -> DiffOperator:
        return ComposedOp(self.b.transpose(), self.a.transpose())


class SumOp(DiffOperator):
    """Pointwise sum of operators of equal order (residual combinations)."""

    def __init__(self, terms, signs=None):
        self.terms = list(terms)
        self.signs = list(signs) if signs else [1.0] * len(self.terms)
        self.order = max(t.order for t in self.terms)

    def apply_jet(self, f: Jet) -> Jet:
        out = self._check(f)
        acc = jets.jet_const(0.0, out, f.base)
        for s, t in zip(self.signs, self.terms):
            acc = acc + s * t.apply_jet(f).truncate(out)
        return acc

    def transpose(self) -> DiffOperator:
        return SumOp([t.transpose() for t in self.terms], self.signs)


class TransposedOp(DiffOperator):
    """Formal transpose: (sum c_k d^k)^t psi = sum (-1)^k d^k (c_k psi).

    Needs coefficient jets of the wrapped operator, so it only wraps
    operators exposing `coeff_jets`.
    """

    def __init__(self, op):
        self.op = op
        self.order = op.order

    def apply_jet(self, f: Jet) -> Jet:
        out = self._check(f)
        q0 = f.base
        cs = self.op.coeff_jets(q0, f.order)
        acc = jets.jet_const(0.0, out, q0)
        for k, c in enumerate(cs):
            term = (c * f).derivative(k).truncate(out)
            acc = acc + ((-1) ** k) * term
        return acc

    def transpose(self) -> DiffOperator:
        return self.op


def compose(*ops: DiffOperator) -> DiffOperator:
    """Compose operators left to right: compose(A, B) acts as A(B(.))."""
    if not ops:
        raise ValueError("compose needs at least one operator")
    out = ops[0]
    for op in ops[1:]:
        out = ComposedOp(out, op)
    return out


def transpose(op: DiffOperator) -> DiffOperator:
    return op.transpose()


def apply(op: DiffOperator, f, q0: complex) -> complex:
    """Value of (op f)(q0); f may be a ScalarFunction or a Jet."""
    if isinstance(f, Jet):
        return op.apply_jet(f).value
    jet = f.eval_jet(q0, op.order)
    return op.apply_jet(jet).value


def d_dq() -> LinearDiffOp:
    """The plain derivative operator."""
    return LinearDiffOp([0.0, 1.0])


# -- coefficient expansion of an operator DAG --------------------------------

def coeff_jets(op: DiffOperator, q0: complex, order: int) -> list[Jet]:
    """Coefficient jets [c_0 .. c_m] of `op` at q0, expanded to `order`.

    Compositions expand by Leibniz's rule; transposes by the alternating-sign
    derivative formula. This is the bridge from lazily composed operators to
    explicit coefficient functions (used for term-scale estimates, kernel
    integration, and reading off single coefficients).
    """
    if isinstance(op, (LinearDiffOp, MultiplyOp)):
        return op.coeff_jets(q0, order)
    if isinstance(op, ComposedOp):
        # need extra orders on the inner coefficients: outer derivatives hit them
        a = coeff_jets(op.a, q0, order + op.b.order)
        b = coeff_jets(op.b, q0, order + op.a.order)
        n = op.order
        out = [jets.jet_const(0.0, order, q0) for _ in range(n + 1)]
        for i, ai in enumerate(a):
            ai_t = ai.truncate(order)
            for j, bj in enumerate(b):
                # a_i d^i (b_j d^j .) = a_i sum_l C(i,l) b_j^(l) d^{i+j-l}
                for l in range(i + 1):
                    k = i + j - l
                    djb = bj.derivative(l) if l else bj
                    term = ai_t * djb.truncate(order) * math.comb(i, l)
                    out[k] = out[k] + term
        return out
    if isinstance(op, TransposedOp):
        inner = coeff_jets(op.op, q0, order + op.order)
        n = op.order
        out = [jets.jet_const(0.0, order, q0) for _ in range(n + 1)]
        # (c_j d^j)^t = (-1)^j d^j (c_j .) = (-1)^j sum_k C(j,k) c_j^(j-k) d^k
        for j, cj in enumerate(inner):
            for k in range(j + 1):
                term = cj.derivative(j - k).truncate(order) * \
                    (((-1) ** j) * math.comb(j, k))
                out[k] = out[k] + term
        return out
    if isinstance(op, SumOp):
        n = op.order
        out = [jets.jet_const(0.0, order, q0) for _ in range(n + 1)]
        for s, t in zip(op.signs, op.terms):
            for k, c in enumerate(coeff_jets(t, q0, order)):
                out[k] = out[k] + s * c
        return out
    if isinstance(op, WronskianOp):
        return op.coeff_jets(q0, order)
    raise TypeError(f"cannot expand coefficients of {type(op).__name__}")


def term_scale(op: DiffOperator, f: Jet) -> float:
    """Cancellation envelope sum_k |c_k(q0)| |f^(k)(q0)| of (op f)(q0).

    The natural magnitude against which a near-zero application value is a
    meaningful relative residual.
    """
    cs = coeff_jets(op, f.base, 0)
    total = 0.0
    for k, c in enumerate(cs):
        total += abs(c.value) * abs(f.derivative_value(k))
    return total


# -- Wronskian-based annihilator ---------------------------------------------

def _det_jets(matrix: list[list[Jet]], zero: Jet) -> Jet:
    """Determinant of a square jet matrix (elimination, partial pivoting)."""
    n = len(matrix)
    m = [row[:] for row in matrix]
    det = None
    sign = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col].value))
        if abs(m[piv][col].value) == 0.0:
            return zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pivot = m[col][col]
        det = pivot if det is None else det * pivot
        for r in range(col + 1, n):
            factor = m[r][col] / pivot
            for c in range(col + 1, n):
                m[r][c] = m[r][c] - factor * m[col][c]
    return sign * det


class WronskianOp(DiffOperator):
    """g(q) (d^N + sum w_k d^k), the operator annihilating a given basis.

    Application at a point is the ratio of two Wronskian determinants in jet
    arithmetic; single coefficients come from the cofactor minors. The basis
    must stay linearly independent on the evaluation set (the determinant is
    checked against a Hadamard-style row bound).
    """

    #: relative floor for |Wronskian| against the row-norm product
    DEGENERACY_TOL = 1e-10

    def __init__(self, basis, g=None):
        if not basis:
            raise ValueError("empty basis")
        self.basis = list(basis)
        self.g = g
        self.order = len(self.basis)

    def _derivative_rows(self, q0: complex, order: int, rows: int):
        """Jets of basis derivatives: out[j][i] = basis_i^(j), each to `order`."""
        n = self.order
        base_jets = [b.eval_jet(q0, order + rows - 1) for b in self.basis]
        table = []
        current = base_jets
        for j in range(rows):
            table.append([c.truncate(order) for c in current])
            if j < rows - 1:
                current = [c.derivative() for c in current]
        return table

    def _wronskian_jet(self, q0: complex, order: int) -> Jet:
        n = self.order
        rows = self._derivative_rows(q0, order, n)
        matrix = [[rows[j][i] for i in range(n)] for j in range(n)]
        zero = jets.jet_const(0.0, order, q0)
        det = _det_jets(matrix, zero)
        # Hadamard-style degeneracy guard on the value matrix
        vals = np.array([[m.value for m in row] for row in matrix])
        bound = float(np.prod(np.linalg.norm(vals, axis=1)))
        if abs(det.value) < self.DEGENERACY_TOL * max(bound, 1e-300):
            raise DegenerateBasis(
                f"basis Wronskian {det.value} below tolerance at {q0}")
        return det

    def apply_jet(self, f: Jet) -> Jet:
        out = self._check(f)
        q0 = f.base
        n = self.order
        rows = self._derivative_rows(q0, out, n + 1)
        zero = jets.jet_const(0.0, out, q0)
        matrix = []
        d = f
        for j in range(n + 1):
            if j > 0:
                d = d.derivative()
            matrix.append([rows[j][i] for i in range(n)] + [d.truncate(out)])
        den = self._wronskian_jet(q0, out)
        num = _det_jets(matrix, zero)
        res = num / den
        if self.g is not None:
            res = _coeff_jet(self.g, q0, out) * res
        return res

    def coeff_jets(self, q0: complex, order: int) -> list[Jet]:
        n = self.order
        rows = self._derivative_rows(q0, order, n + 1)
        den = self._wronskian_jet(q0, order)
        zero = jets.jet_const(0.0, order, q0)
        gj = (_coeff_jet(self.g, q0, order) if self.g is not None
              else jets.jet_const(1.0, order, q0))
        out = []
        for k in range(n + 1):
            minor = [[rows[j][i] for i in range(n)]
                     for j in range(n + 1) if j != k]
            det = _det_jets(minor, zero)
            out.append(((-1) ** (n + k)) * gj * det / den)
        return out

    def log_wronskian_slope(self, q0: complex, order: int = 0) -> Jet:
        """w_{N-1} of the monic core: minus the log-derivative of the
        basis Wronskian."""
        w = self._wronskian_jet(q0, order + 1)
        return -(w.derivative() / w.truncate(order))

    def transpose(self) -> DiffOperator:
        return TransposedOp(self)


def annihilator_from_basis(basis, g=None) -> WronskianOp:
    """Most general operator of order len(basis) with kernel span(basis),
    scaled by g (monic core when g is None)."""
    return WronskianOp(basis, g)


# -- kernel bases of explicit-coefficient operators ---------------------------

def kernel_basis(op: DiffOperator, anchor: complex, jet_order: int = 18):
    """Numerically integrated kernel basis of an operator with coefficients.

    Returns N CallableFn solutions y_i of (op y) = 0 with y_i^(j)(anchor) =
    delta_ij. Solutions extend away from the anchor by Taylor stepping; each
    evaluation point is reached through cached intermediate nodes. The
    leading coefficient must stay away from zero along the path.
    """
    n = op.order

    def extend(q0: complex, init: np.ndarray, order: int) -> Jet:
        # init: scaled coefficients y_0..y_{n-1} at q0; fill the rest from
        # the ODE c_n y^(n) = -(sum_{k<n} c_k y^(k)) order by order
        coeffs = np.zeros(order + 1, dtype=np.complex128)
        if order + 1 <= n:
            coeffs[:] = init[:order + 1]
            return Jet(q0, coeffs)
        cs = coeff_jets(op, q0, order)
        coeffs[:n] = init
        for j in range(0, order + 1 - n):
            y = Jet(q0, coeffs[:j + n])
            rhs = jets.jet_const(0.0, j, q0)
            for k in range(n):
                dk = y.derivative(k) if k else y
                rhs = rhs - cs[k].truncate(j) * dk.truncate(j)
            lead = cs[n].truncate(j)
            val = (rhs / lead).coeffs[j]
            coeffs[j + n] = val * math.factorial(j) / math.factorial(j + n)
        return Jet(q0, coeffs)

    class Solution:
        def __init__(self, idx: int):
            init = np.zeros(n, dtype=np.complex128)
            init[idx] = 1.0 / math.factorial(idx)
            self.nodes = {complex(anchor): init}

        def _state_at(self, q0: complex) -> np.ndarray:
            q0 = complex(q0)
            if q0 in self.nodes:
                return self.nodes[q0]
            near = min(self.nodes, key=lambda p: abs(p - q0))
            state = self.nodes[near]
            pos = near
            while abs(q0 - pos) > 1e-15 * (1.0 + abs(q0)):
                jet = extend(pos, state, jet_order)
                tail = max(abs(jet.coeffs[-1]), abs(jet.coeffs[-2]), 1e-300)
                h = 0.5 * (1e-16 * max(1.0, abs(jet.coeffs[0])) / tail) ** (1.0 / jet_order)
                h = min(h, abs(q0 - pos))
                step = h * (q0 - pos) / abs(q0 - pos)
                nxt = pos + step
                # re-expand the local Taylor solution at the new point
                shifted = _shift_series(jet.coeffs, step)
                state = shifted[:n]
                pos = nxt
                self.nodes[pos] = state
            return state

        def __call__(self, q0: complex, order: int) -> Jet:
            state = self._state_at(q0)
            return extend(complex(q0), state, order)

    return [CallableFn(Solution(i), name=f"kernel_{i}", memo=True)
            for i in range(n)]


def _shift_series(coeffs: np.ndarray, h: complex) -> np.ndarray:
    """Scaled Taylor coefficients re-expanded at base + h."""
    n = coeffs.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        # out[j] = sum_k c_k C(k, j) h^(k-j)
        ck = coeffs[k]
        if ck == 0:
            continue
        p = 1.0 + 0.0j
        for j in range(k, -1, -1):
            out[j] += ck * math.comb(k, j) * p
            p *= h
    return out
