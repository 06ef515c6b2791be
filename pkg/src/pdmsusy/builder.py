"""Generic construction of a supersymmetric partner pair with
position-dependent mass.

Inputs are the gauged data (a second-order operator -A d^2 - B d - C in an
auxiliary variable z together with an invariant function basis) and a mass
profile. The construction:

1. solves z'(q)^2 = 2 m(q) A(z) for the change of variable (Taylor-series
   ODE stepping, branch fixed at the anchor),
2. determines the scalar shift delta-C between the two gauged operators from
   the top coefficients of the intertwining relation,
3. integrates the gauge potential from
   dW/dq = z''/2z' - m B(z)/z' - m'/2m,
4. conjugates both gauged operators into mass-deformed Schroedinger form and
   reads off the effective potentials by applying them to 1, q, q^2,
5. assembles the supercharge as the scaled Wronskian annihilator of the
   transformed basis.

Everything is certified pointwise on sample grids, never symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import diffop, jets
from .diffop import DiffOperator, LinearDiffOp, WronskianOp
from .errors import (BuildError, InvarianceViolated,
                     SingularTurningPoint)
from .jets import Jet
from .scalarfn import (Antiderivative, CallableFn, Deriv, MassProfile,
                       PowInt, PowReal, ScalarFunction)

_TURNING_FLOOR = 1e-10


@dataclass
class GaugedData:
    """Second-order operator coefficients in z plus the invariant basis.

    The operator -A d^2/dz^2 - B d/dz - C must map span(basis) into itself;
    `validate` checks this by collocation least squares.
    """

    A: ScalarFunction
    B: ScalarFunction
    C: ScalarFunction
    basis: list
    N: int
    monomial: bool = False

    def __post_init__(self):
        if self.N != len(self.basis):
            raise ValueError("basis dimension must equal N")

    def gauged_op(self) -> LinearDiffOp:
        return LinearDiffOp([-1 * self.C, -1 * self.B, -1 * self.A])

    def validate(self, z_points, tol: float = 1e-8) -> float:
        """Invariance residual of the gauged operator on the basis."""
        pts = list(z_points)
        if len(pts) < 2 * self.N:
            raise ValueError("need at least 2N validation points")
        op = self.gauged_op()
        phi = np.array([[b.eval_jet(z, 0).value for b in self.basis]
                        for z in pts])
        worst = 0.0
        for b in self.basis:
            rhs = np.array([diffop.apply(op, b, z) for z in pts])
            sol, *_ = np.linalg.lstsq(phi, rhs, rcond=None)
            res = np.max(np.abs(phi @ sol - rhs))
            scale = max(1.0, float(np.max(np.abs(rhs))))
            worst = max(worst, res / scale)
        if worst > tol:
            raise InvarianceViolated(
                f"basis is not preserved: residual {worst:.3e} > {tol:.1e}")
        return worst


@dataclass(frozen=True)
class Anchors:
    """Anchor data for the change of variable and the gauge potentials."""

    q_anchor: complex
    z_anchor: complex
    branch: int = 1


class ZMap:
    """Change of variable z(q) from z'^2 = 2 m(q) A(z), with jets.

    The value at a new point comes from Taylor stepping along cached nodes;
    all higher Taylor coefficients then follow from the first-order ODE
    recurrence, so jets are exact given the node value. The slope branch is
    fixed at the anchor and never crosses zero (windows containing turning
    points are rejected).
    """

    def __init__(self, A: ScalarFunction, mass: MassProfile,
                 anchors: Anchors, step_order: int = 14):
        self.A = A
        self.mass = mass
        self.anchors = anchors
        self.step_order = step_order
        self.nodes: dict[complex, complex] = {
            complex(anchors.q_anchor): complex(anchors.z_anchor)}
        self._memo: dict[tuple, Jet] = {}

    def _ode_jet(self, q0: complex, z0: complex, order: int) -> Jet:
        a0 = self.A.eval_jet(z0, 0).value
        if abs(a0) < _TURNING_FLOOR * (1.0 + abs(z0)):
            raise SingularTurningPoint(
                f"A(z) ~ {a0} near zero at q = {q0}, z = {z0}")
        coeffs = np.zeros(order + 1, dtype=np.complex128)
        coeffs[0] = z0
        for j in range(order):
            zj = Jet(q0, coeffs[:j + 1])
            mj = self.mass.m.eval_jet(q0, j)
            aj = jets.compose(self.A.eval_jet(z0, j), zj)
            slope = self.anchors.branch * jets.sqrt(2.0 * mj * aj)
            coeffs[j + 1] = slope.coeffs[j] / (j + 1)
        return Jet(q0, coeffs)

    def _value_at(self, q0: complex) -> complex:
        q0 = complex(q0)
        if q0 in self.nodes:
            return self.nodes[q0]
        pos = min(self.nodes, key=lambda p: abs(p - q0))
        z = self.nodes[pos]
        K = self.step_order
        for _ in range(4096):
            if abs(q0 - pos) <= 1e-15 * (1.0 + abs(q0)):
                self.nodes[q0] = z
                return z
            jet = self._ode_jet(pos, z, K)
            tail = max(abs(jet.coeffs[-1]), abs(jet.coeffs[-2]), 1e-300)
            h = 0.5 * (1e-16 * max(1.0, abs(z)) / tail) ** (1.0 / K)
            h = min(h, abs(q0 - pos))
            # shrink until the arrival slope matches the branch: a
            # terminating series would otherwise glide across a turning
            # point onto the mirror solution
            while True:
                step = h * (q0 - pos) / abs(q0 - pos)
                powers = step ** np.arange(K + 1)
                z_new = complex(np.dot(jet.coeffs, powers))
                slope_poly = complex(
                    np.dot(jet.coeffs[1:] * np.arange(1, K + 1),
                           powers[:K]))
                try:
                    probe = self._ode_jet(pos + step, z_new, 1)
                except SingularTurningPoint:
                    probe = None
                if probe is not None:
                    slope_true = probe.derivative_value(1)
                    mismatch = abs(slope_poly - slope_true)
                    if mismatch <= 1e-6 * (1.0 + abs(slope_true)):
                        break
                if h < 1e-9 * (1.0 + abs(q0)):
                    raise SingularTurningPoint(
                        f"slope branch lost near q = {pos + step}")
                h *= 0.5
            z = z_new
            pos = pos + step
            self.nodes[pos] = z
        raise BuildError(f"change-of-variable stepping stalled near {pos}")

    def jet_at(self, q0: complex, order: int) -> Jet:
        key = (complex(q0), order)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._ode_jet(complex(q0), self._value_at(q0), order)
            self._memo[key] = hit
        return hit

    def __call__(self, q0: complex) -> complex:
        return self._value_at(q0)

    def as_fn(self) -> CallableFn:
        return CallableFn(self.jet_at, name="z_of_q")


def of_z(fn_z, zmap) -> CallableFn:
    """Lift a function of z to a jet-evaluable function of q via z(q)."""

    def ev(q0, order):
        zj = zmap.jet_at(q0, order)
        return jets.compose(fn_z.eval_jet(zj.value, order), zj)

    name = getattr(fn_z, "name", "")
    return CallableFn(ev, name=f"{name}(z(q))", memo=True)


def pdm_hamiltonian(mass: MassProfile, U) -> LinearDiffOp:
    """Schroedinger operator -1/(2m) d^2 + m'/(2m^2) d + U.

    The first-order coefficient divides by m twice (not by m^2) so profiles
    with very small mass values stay clear of the singularity floor.
    """
    m = mass.m
    return LinearDiffOp([U, 0.5 * (Deriv(m, 1) / m) / m,
                         -0.5 * PowInt(m, -1)])


class ConjugatedOp(DiffOperator):
    """exp(-w) . core . exp(w), applied exactly through jets of w."""

    def __init__(self, core: DiffOperator, w):
        self.core = core
        self.w = w
        self.order = core.order

    def apply_jet(self, f: Jet) -> Jet:
        out = self._check(f)
        wj = self.w.eval_jet(f.base, f.order)
        inner = jets.exp(wj) * f
        res = self.core.apply_jet(inner)
        return jets.exp(-wj.truncate(out)) * res

    def transpose(self) -> DiffOperator:
        return ConjugatedOp(self.core.transpose(), -1 * self.w)


@dataclass
class BuiltSystem:
    """A fully assembled partner pair with its certificates' ingredients."""

    N: int
    data: GaugedData
    mass: MassProfile
    anchors: Anchors
    window: tuple
    H_minus: LinearDiffOp
    H_plus: LinearDiffOp
    P_N: DiffOperator
    P_N_t: DiffOperator
    U_minus: CallableFn
    U_plus: CallableFn
    W_gauge_minus: ScalarFunction
    W_gauge_plus: ScalarFunction
    z_of_q: ZMap
    sector_minus: list
    E_fn: CallableFn
    W_fn: CallableFn
    w_top: CallableFn
    g_fn: CallableFn
    delta_C: CallableFn
    _sector_plus: list | None = field(default=None, repr=False)

    @property
    def default_jet_order(self) -> int:
        # anti-commutator tests compose order 2N; each Hamiltonian costs 2
        return 2 * self.N + 4

    @property
    def sector_plus(self) -> list:
        if self._sector_plus is None:
            self._sector_plus = self._solve_sector_plus()
        return self._sector_plus

    def _solve_sector_plus(self):
        anchor = self.anchors.q_anchor
        raw = diffop.kernel_basis(self.P_N_t, anchor)
        return raw

    def grid(self, n: int = 9, margin: float = 0.08) -> list:
        qa, qb = self.window
        lo = qa + margin * (qb - qa)
        hi = qb - margin * (qb - qa)
        return [complex(q) for q in np.linspace(lo, hi, n)]


def solve_change_of_variable(A: ScalarFunction, mass: MassProfile,
                             q_anchor: complex, z_anchor: complex,
                             branch: int = 1) -> ZMap:
    """Change of variable z(q) with z(q_anchor) = z_anchor and the slope
    branch of sqrt fixed at the anchor."""
    return ZMap(A, mass, Anchors(q_anchor, z_anchor, branch))


def compute_gauge_and_delta(data: GaugedData, mass: MassProfile,
                            zmap: ZMap, q_anchor: complex):
    """Gauge potential (anchored to 0), scalar shift delta-C, and the
    supercharge scale g = m^(-N/2) z'^N."""
    N = data.N
    ann_z = diffop.annihilator_from_basis(data.basis)

    A, B = data.A, data.B
    A1 = Deriv(A, 1)
    A2 = Deriv(A, 2)
    B1 = Deriv(B, 1)

    def delta_c_ev(z0, order):
        wt = ann_z.log_wronskian_slope(z0, order + 1)
        a = A.eval_jet(z0, order)
        a1 = A1.eval_jet(z0, order)
        a2 = A2.eval_jet(z0, order)
        b = B.eval_jet(z0, order)
        b1 = B1.eval_jet(z0, order)
        wt0 = wt.truncate(order)
        return (0.5 * N * (N - 2) * (a2 - a1 * a1 / (2.0 * a))
                + N * (b1 - b * a1 / (2.0 * a))
                - a1 * wt0 - 2.0 * a * wt.derivative().truncate(order))

    delta_C = CallableFn(delta_c_ev, name="delta_C", memo=True)

    m = mass.m
    B_of_q = of_z(B, zmap)

    def gauge_slope(q0, order):
        zj = zmap.jet_at(q0, order + 2)
        z1 = zj.derivative()
        z2 = z1.derivative()
        mj = m.eval_jet(q0, order + 1)
        m1 = mj.derivative()
        bq = B_of_q.eval_jet(q0, order)
        z1t = z1.truncate(order)
        return (z2.truncate(order) / (2.0 * z1t)
                - mj.truncate(order) * bq / z1t
                - m1.truncate(order) / (2.0 * mj.truncate(order)))

    w_minus = Antiderivative(CallableFn(gauge_slope, name="gauge_slope"),
                             q_anchor, 0.0)

    def g_ev(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        mj = m.eval_jet(q0, order)
        return jets.powr(mj, -0.5 * N) * \
            jets.pow_int(zj.derivative().truncate(order), N)

    g_fn = CallableFn(g_ev, name="g", memo=True)
    return w_minus, delta_C, g_fn


def build(data: GaugedData, mass: MassProfile, anchors: Anchors,
          window: tuple, invariance_tol: float = 1e-8,
          pattern_tol: float = 1e-6) -> BuiltSystem:
    """Assemble the partner pair; see the module docstring for the steps."""
    N = data.N
    qa, qb = window
    zmap = ZMap(data.A, mass, anchors)

    probe_q = np.linspace(qa + 0.05 * (qb - qa), qb - 0.05 * (qb - qa),
                          2 * N + 3)
    z_probe = [zmap(complex(q)) for q in probe_q]
    data.validate(z_probe, invariance_tol)

    w_minus, delta_C, g_fn = compute_gauge_and_delta(
        data, mass, zmap, anchors.q_anchor)

    m = mass.m

    # counter gauge potential, anchored to 0 at the anchor point
    def w_plus_raw(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        mj = m.eval_jet(q0, order)
        wm = w_minus.eval_jet(q0, order)
        return (-1.0 * wm + (N - 1) * jets.log(zj.derivative().truncate(order))
                - 0.5 * N * jets.log(mj))

    w_plus_offset = w_plus_raw(anchors.q_anchor, 0).value
    w_plus = CallableFn(lambda q0, order: w_plus_raw(q0, order) - w_plus_offset,
                        name="W_gauge_plus", memo=True)

    # E = z''/z' and W = -m Q(z)/z' with Q = (N-2)/2 A' + B
    Q_z = 0.5 * (N - 2) * Deriv(data.A, 1) + data.B
    Q_of_q = of_z(Q_z, zmap)

    def e_ev(q0, order):
        zj = zmap.jet_at(q0, order + 2)
        z1 = zj.derivative()
        return z1.derivative() / z1.truncate(order)

    def w_ev(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        mj = m.eval_jet(q0, order)
        return -1.0 * mj * Q_of_q.eval_jet(q0, order) / \
            zj.derivative().truncate(order)

    E_fn = CallableFn(e_ev, name="E", memo=True)
    W_fn = CallableFn(w_ev, name="W", memo=True)

    # gauged operators expressed in q (d/dz = (1/z') d/dq)
    A_of_q = of_z(data.A, zmap)
    B_of_q = of_z(data.B, zmap)
    C_of_q = of_z(data.C, zmap)
    dC_of_q = of_z(delta_C, zmap)

    def c2_ev(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        z1 = zj.derivative()
        return -1.0 * A_of_q.eval_jet(q0, order) / (z1 * z1)

    def c1_ev(q0, order):
        zj = zmap.jet_at(q0, order + 2)
        z1 = zj.derivative()
        z2 = z1.derivative().truncate(order)
        z1t = z1.truncate(order)
        return (A_of_q.eval_jet(q0, order) * z2 / jets.pow_int(z1t, 3)
                - B_of_q.eval_jet(q0, order) / z1t)

    c2 = CallableFn(c2_ev, memo=True)
    c1 = CallableFn(c1_ev, memo=True)
    core_minus = LinearDiffOp([-1 * C_of_q, c1, c2])
    core_plus = LinearDiffOp([-1 * (C_of_q + dC_of_q), c1, c2])
    # both gauged operators are conjugated by the same (minus) potential
    H_conj_minus = ConjugatedOp(core_minus, w_minus)
    H_conj_plus = ConjugatedOp(core_plus, w_minus)

    def u_from(conj):
        def ev(q0, order):
            one = jets.jet_const(1.0, order + 2, q0)
            return conj.apply_jet(one)
        return CallableFn(ev, memo=True)

    U_minus = u_from(H_conj_minus)
    U_plus = u_from(H_conj_plus)

    _validate_pdm_pattern(H_conj_minus, mass, window, pattern_tol)

    H_minus = pdm_hamiltonian(mass, U_minus)
    H_plus = pdm_hamiltonian(mass, U_plus)

    # solvable sector: exp(-W) basis(z(q))
    def sector_fn(b):
        def ev(q0, order):
            zj = zmap.jet_at(q0, order)
            wj = w_minus.eval_jet(q0, order)
            return jets.exp(-1.0 * wj) * jets.compose(
                b.eval_jet(zj.value, order), zj)
        return CallableFn(ev, name="sector_minus", memo=True)

    sector_minus = [sector_fn(b) for b in data.basis]

    m_scale = PowReal(m, -0.5 * N)
    P_N = WronskianOp(sector_minus, g=m_scale)
    P_N_t = P_N.transpose()

    def w_top_ev(q0, order):
        slope = P_N.log_wronskian_slope(q0, order)
        return m_scale.eval_jet(q0, order) * slope

    w_top = CallableFn(w_top_ev, name="w_top", memo=True)

    sector_plus = None
    if data.monomial:
        def sector_plus_fn(b):
            def ev(q0, order):
                zj = zmap.jet_at(q0, order)
                wj = w_plus.eval_jet(q0, order)
                return jets.exp(-1.0 * wj) * jets.compose(
                    b.eval_jet(zj.value, order), zj)
            return CallableFn(ev, name="sector_plus", memo=True)
        sector_plus = [sector_plus_fn(b) for b in data.basis]

    return BuiltSystem(
        N=N, data=data, mass=mass, anchors=anchors, window=window,
        H_minus=H_minus, H_plus=H_plus, P_N=P_N, P_N_t=P_N_t,
        U_minus=U_minus, U_plus=U_plus,
        W_gauge_minus=w_minus, W_gauge_plus=w_plus,
        z_of_q=zmap, sector_minus=sector_minus,
        E_fn=E_fn, W_fn=W_fn, w_top=w_top, g_fn=g_fn, delta_C=dC_of_q,
        _sector_plus=sector_plus,
    )


def _validate_pdm_pattern(conj: ConjugatedOp, mass: MassProfile,
                          window: tuple, tol: float) -> None:
    """Check the conjugated operator has Schroedinger-form coefficients.

    Applications to 1, q, q^2 reconstruct the three coefficients; they must
    match -1/2m and m'/2m^2 to `tol` (relative).
    """
    qa, qb = window
    for q0 in np.linspace(qa + 0.1 * (qb - qa), qb - 0.1 * (qb - qa), 5):
        q0 = complex(q0)
        one = jets.jet_const(1.0, 2, q0)
        qv = jets.jet_variable(q0, 2)
        h1 = conj.apply_jet(one).value
        hq = conj.apply_jet(qv).value
        hq2 = conj.apply_jet(qv * qv).value
        c1 = hq - q0 * h1
        c2 = 0.5 * (hq2 - q0 * q0 * h1 - 2.0 * q0 * c1)
        mj = mass.m.eval_jet(q0, 1)
        want2 = -0.5 / mj.value
        want1 = mj.derivative_value(1) / (2.0 * mj.value ** 2)
        scale = max(abs(want2), abs(want1), 1.0)
        if abs(c2 - want2) > tol * scale or abs(c1 - want1) > tol * scale:
            raise BuildError(
                f"conjugated operator is not in Schroedinger form at {q0}: "
                f"d^2 coeff {c2} vs {want2}, d coeff {c1} vs {want1}")
