"""Type A systems: the five-case classification over the monomial space.

A type A system is characterized by the invariant space <1, z, ..., z^(N-1)>
together with a quadratic Q(z) = b2 z^2 + b1 z + b0 and a case-canonical
A(z) (five inequivalent canonical forms under the complex projective
classification). Everything here is expressed through the change of
variable z = f(u(q)), u' = sqrt(m):

    case I    A = 1/2            f(u) = u
    case II   A = 2z             f(u) = u^2
    case III  A = 2 nu z^2       f(u) = exp(2 sqrt(nu) u)
    case IV   A = 2 nu (z^2-1)   f(u) = cosh(2 sqrt(nu) u)
    case V    A = 2z^3 - g2 z/2 - g3/2     f(u) = wp(u; g2, g3)

The module provides the factorized supercharge (ordered product of
first-order factors), the partner Hamiltonians in terms of W(q) and
E(q) = z''/z', literal per-case effective potentials and sectors, the
Weierstrass evaluator for case V, and the q-space residual checks of the
two structural conditions (Q''' = 0, A''''' = 0).

Case V note: the literal coupling constants eta_l of the printed potential
disagree with the residue computation eta_l = Q(e_l)^2 +- 2N H_l^2 Q(e_l)
+ (N^2-1) H_l^4 whenever b1 != 0 or g3 != 0 (similarly the printed sector
exponent carries -b1 e_l where the integral of Q(f)/f' gives +b1 e_l).
Both variants are exposed; cross-validation against the generic builder
arbitrates. Systems built here always use the residue-consistent gauge
integral, so their kernel and intertwining certificates hold for generic
parameters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import builder, jets, scalarfn
from .builder import Anchors, BuiltSystem, GaugedData, pdm_hamiltonian
from .diffop import LinearDiffOp, MultiplyOp, compose
from .errors import BadParams, CaseSingularity, LatticePole
from .jets import Jet
from .scalarfn import (CallableFn, Const, Deriv, MassProfile, PowInt, PowReal,
                       ScalarFunction, SpecialFunction, Var, quad)

CASES = ("I", "II", "III", "IV", "V")


# -- Weierstrass elliptic function -------------------------------------------

def _wp_laurent_coeffs(g2: complex, g3: complex, nterms: int = 30):
    c = [0j] * (nterms + 1)
    if nterms >= 2:
        c[2] = g2 / 20.0
    if nterms >= 3:
        c[3] = g3 / 28.0
    for k in range(4, nterms + 1):
        s = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * s / ((2 * k + 1) * (k - 3))
    return c


def weierstrass_e_roots(g2: complex, g3: complex) -> list[complex]:
    """Roots of 4 z^3 - g2 z - g3 sorted by (Re, Im)."""
    r = np.roots([4.0, 0.0, -complex(g2), -complex(g3)])
    return sorted((complex(x) for x in r), key=lambda e: (e.real, e.imag))


def weierstrass_p(u: complex, g2: complex, g3: complex) -> tuple:
    """Values (wp, wp') by Laurent series plus argument-halving duplication.

    The series is summed inside a disc set by the root scale; duplication
    maps the value back out. Arguments at (or numerically on top of) a
    lattice point raise LatticePole.
    """
    u = complex(u)
    g2 = complex(g2)
    g3 = complex(g3)
    if g2 ** 3 - 27.0 * g3 ** 2 == 0:
        raise BadParams("degenerate invariants: g2^3 - 27 g3^2 = 0")
    if u == 0:
        raise LatticePole("wp pole at u = 0")
    scale = max(abs(e) for e in weierstrass_e_roots(g2, g3)) ** 0.5
    radius = 0.4 / scale
    steps = 0
    v = u
    while abs(v) > radius and steps < 60:
        v *= 0.5
        steps += 1

    coeffs = _wp_laurent_coeffs(g2, g3)
    v2 = v * v
    p = 1.0 / v2
    dp = -2.0 / (v2 * v)
    vp = 1.0 + 0.0j
    for k in range(2, len(coeffs)):
        vp = v ** (2 * k - 3)
        p += coeffs[k] * vp * v
        dp += (2 * k - 2) * coeffs[k] * vp

    for _ in range(steps):
        if abs(dp) < 1e-13 * (1.0 + abs(p)) ** 1.5:
            raise LatticePole(f"duplication hit a half-period from u = {u}")
        ddp = 6.0 * p * p - 0.5 * g2
        dddp = 12.0 * p * dp
        p2 = -2.0 * p + (ddp * ddp) / (4.0 * dp * dp)
        dp2 = 0.5 * (-2.0 * dp + ddp * dddp / (2.0 * dp * dp)
                     - (ddp ** 3) / (2.0 * dp ** 3))
        p, dp = p2, dp2

    if not (np.isfinite(p.real) and np.isfinite(p.imag)):
        raise LatticePole(f"wp overflow near lattice point, u = {u}")
    return p, dp


def weierstrass_p_jet(u0: complex, g2: complex, g3: complex,
                      order: int) -> Jet:
    """Jet of wp at u0: values from the series, higher coefficients from the
    second-order equation wp'' = 6 wp^2 - g2/2."""
    p, dp = weierstrass_p(u0, g2, g3)
    coeffs = np.zeros(order + 1, dtype=np.complex128)
    coeffs[0] = p
    if order >= 1:
        coeffs[1] = dp
    for k in range(order - 1):
        sq = np.dot(coeffs[:k + 1], coeffs[k::-1])
        rhs = 6.0 * sq - (0.5 * g2 if k == 0 else 0.0)
        coeffs[k + 2] = rhs / ((k + 1) * (k + 2))
    return Jet(u0, coeffs)


def real_half_period(g2: float, g3: float) -> float:
    """Real half-period for real invariants with a real largest root."""
    e = weierstrass_e_roots(g2, g3)
    e1 = max(e, key=lambda x: x.real)
    if abs(e1.imag) > 1e-12 * (1.0 + abs(e1)):
        raise BadParams("largest root is not real; no real half-period")
    e1 = e1.real

    def integrand(theta):
        # x = sin^2(theta), t = e1 + (1-x)/x: regularizes both endpoints
        sn = cmath.sin(theta)
        cn = cmath.cos(theta)
        x = sn * sn
        t = e1 + (cn * cn) / x
        val = 4.0 * t ** 3 - g2 * t - g3
        return 2.0 * sn * cn / (x * x * cmath.sqrt(val))

    val = quad(integrand, 1e-12, math.pi / 2.0 - 1e-12, tol=1e-12)
    return float(val.real)


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class TypeAConfig:
    """Case, order, and coefficients of one type A model.

    b = (b2, b1, b0) are the coefficients of Q(z); R is the additive
    constant of the gauged operator. Cases III and IV need nu != 0; case V
    needs non-degenerate invariants (g2, g3).
    """

    N: int
    b: tuple
    R: complex = 0.0
    case: str = "I"
    nu: complex | None = None
    g2: complex | None = None
    g3: complex | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise BadParams(f"unknown case {self.case!r}")
        if self.N < 1 or int(self.N) != self.N:
            raise BadParams("N must be a positive integer")
        if len(self.b) != 3:
            raise BadParams("b must be (b2, b1, b0)")
        object.__setattr__(self, "b", tuple(complex(x) for x in self.b))
        object.__setattr__(self, "R", complex(self.R))
        if self.case in ("III", "IV"):
            if self.nu is None or complex(self.nu) == 0:
                raise BadParams(f"case {self.case} needs nu != 0")
            object.__setattr__(self, "nu", complex(self.nu))
        if self.case == "V":
            if self.g2 is None or self.g3 is None:
                raise BadParams("case V needs (g2, g3)")
            g2, g3 = complex(self.g2), complex(self.g3)
            if g2 ** 3 - 27.0 * g3 ** 2 == 0:
                raise BadParams("case V needs g2^3 - 27 g3^2 != 0")
            object.__setattr__(self, "g2", g2)
            object.__setattr__(self, "g3", g3)

    @property
    def is_solvable(self) -> bool:
        """Whole flag of preserved spaces: cases I-IV with b2 = 0."""
        return self.case != "V" and self.b[0] == 0

    @property
    def a_coeffs(self) -> tuple:
        """(a4, a3, a2, a1, a0) of the case-canonical A(z)."""
        if self.case == "I":
            return (0, 0, 0, 0, 0.5)
        if self.case == "II":
            return (0, 0, 0, 2.0, 0)
        if self.case == "III":
            return (0, 0, 2.0 * self.nu, 0, 0)
        if self.case == "IV":
            return (0, 0, 2.0 * self.nu, 0, -2.0 * self.nu)
        return (0, 2.0, 0, -0.5 * self.g2, -0.5 * self.g3)

    def A_z(self) -> ScalarFunction:
        z = Var()
        a4, a3, a2, a1, a0 = self.a_coeffs
        return a4 * z ** 4 + a3 * z ** 3 + a2 * z * z + a1 * z + Const(a0)

    def Q_z(self) -> ScalarFunction:
        z = Var()
        b2, b1, b0 = self.b
        return b2 * z * z + b1 * z + Const(b0)

    def Q_of(self, x: complex) -> complex:
        b2, b1, b0 = self.b
        return b2 * x * x + b1 * x + b0

    def f_of_u(self) -> ScalarFunction:
        u = Var()
        if self.case == "I":
            return u
        if self.case == "II":
            return u * u
        if self.case == "III":
            return scalarfn.exp(2.0 * cmath.sqrt(self.nu) * u)
        if self.case == "IV":
            return scalarfn.cosh(2.0 * cmath.sqrt(self.nu) * u)
        g2, g3 = self.g2, self.g3
        return SpecialFunction(
            "wp", lambda u0, order: weierstrass_p_jet(u0, g2, g3, order), u)

    def e_roots(self) -> list[complex]:
        if self.case != "V":
            raise BadParams("e-roots only exist for case V")
        return weierstrass_e_roots(self.g2, self.g3)

    def gauge_integral_u(self) -> ScalarFunction:
        """S(u) with S' = Q(f(u))/f'(u), the u-integral in the gauge
        potentials; closed form per case (case V via partial fractions
        over the roots e_l)."""
        u = Var()
        b2, b1, b0 = self.b
        if self.case == "I":
            return (b2 / 3.0) * u ** 3 + (b1 / 2.0) * u * u + b0 * u
        if self.case == "II":
            return ((b2 / 8.0) * u ** 4 + (b1 / 4.0) * u * u
                    + (b0 / 2.0) * scalarfn.log(u))
        nu = self.nu
        s = cmath.sqrt(nu) if nu is not None else None
        if self.case == "III":
            F = scalarfn.exp(2.0 * s * u)
            return (b2 / (4.0 * nu)) * F - (b0 / (4.0 * nu)) / F \
                + (b1 / (2.0 * s)) * u
        if self.case == "IV":
            return ((b2 / (4.0 * nu)) * scalarfn.cosh(2.0 * s * u)
                    + (b1 / (4.0 * nu)) * scalarfn.log(scalarfn.sinh(2.0 * s * u))
                    + ((b2 + b0) / (4.0 * nu)) * scalarfn.log(scalarfn.tanh(s * u)))
        wp = self.f_of_u()
        total: ScalarFunction = Const(0.0)
        for e, h2 in zip(self.e_roots(), self.h_sq()):
            kappa = self.Q_of(e) / (4.0 * h2)
            total = total + kappa * scalarfn.log(wp - e)
        return total

    def h_sq(self) -> list[complex]:
        return [3.0 * e * e - 0.25 * self.g2 for e in self.e_roots()]

    def singular_u_points(self) -> tuple:
        if self.case == "II":
            return (0.0,)
        if self.case == "IV":
            return (0.0,)
        if self.case == "V":
            return (0.0,)
        return ()


def default_u_window(config: TypeAConfig) -> tuple:
    """A real u-interval clear of the case singularities (positive side)."""
    if config.case == "I":
        return (0.35, 1.45)
    if config.case == "II":
        return (0.40, 1.50)
    if config.case == "III":
        return (0.30, 1.40)
    if config.case == "IV":
        return (0.35, 1.30)
    w = real_half_period(config.g2.real, config.g3.real)
    return (0.25 * w, 0.80 * w)


def q_of_u(mass: MassProfile, u_target: complex) -> complex:
    """Invert u(q) = target (closed forms for builtins, Newton otherwise)."""
    name = mass.name
    p = mass.params
    if name == "constant":
        return complex(u_target) / p["c"]
    if name == "exp_scale":
        a = p["alpha"]
        return cmath.log(a * complex(u_target)) / a
    if name == "cauchy_sq":
        return cmath.tan(complex(u_target))
    if name == "sech_like":
        a = p["alpha"]
        return cmath.atanh(cmath.sin(a * complex(u_target))) / a
    q = complex(mass.anchor)
    for _ in range(80):
        j = mass.u.eval_jet(q, 1)
        err = j.value - complex(u_target)
        if abs(err) < 1e-14 * (1.0 + abs(u_target)):
            return q
        q = q - err / j.derivative_value(1)
    raise BadParams(f"could not invert u(q) = {u_target} for {name}")


def window_from_u(config: TypeAConfig, mass: MassProfile,
                  u_window: tuple | None = None) -> tuple:
    ua, ub = u_window if u_window else default_u_window(config)
    qa = q_of_u(mass, ua)
    qb = q_of_u(mass, ub)
    if qa.real > qb.real:
        qa, qb = qb, qa
    return (qa, qb)


class ClosedZMap:
    """z(q) = f(u(q)) through jets of the closed forms (ZMap-compatible)."""

    def __init__(self, f_u: ScalarFunction, mass: MassProfile):
        self.f_u = f_u
        self.mass = mass
        self._memo: dict = {}

    def jet_at(self, q0: complex, order: int) -> Jet:
        key = (complex(q0), order)
        hit = self._memo.get(key)
        if hit is None:
            uj = self.mass.u.eval_jet(q0, order)
            hit = jets.compose(self.f_u.eval_jet(uj.value, order), uj)
            self._memo[key] = hit
        return hit

    def __call__(self, q0: complex) -> complex:
        return self.jet_at(q0, 0).value


@dataclass
class TypeASystem(BuiltSystem):
    """BuiltSystem plus the case machinery and closed-form evaluators."""

    config: TypeAConfig = None
    f_of_u: ScalarFunction = None
    u_of_q: ScalarFunction = None
    is_solvable: bool = False

    def closed_potential(self, sign: int, variant: str = "printed"):
        cfg, mass = self.config, self.mass
        return lambda q: case_potential(cfg, mass, sign, q, variant=variant)

    def closed_sector(self, sign: int, variant: str = "printed"):
        return case_sector(self.config, self.mass, sign, variant=variant,
                           anchor=self.anchors.q_anchor)


def _check_window_clear(config: TypeAConfig, mass: MassProfile,
                        window: tuple) -> None:
    qa, qb = window
    bad = config.singular_u_points()
    if not bad:
        return
    for q in np.linspace(qa.real, qb.real, 33):
        u = mass.u.eval_jet(complex(q, qa.imag), 0).value
        for s in bad:
            if abs(u - s) < 1e-6:
                raise CaseSingularity(
                    f"window touches singular u = {s} (case {config.case})")
    if config.case == "V":
        # stay clear of lattice points: wp must stay finite on the window
        for q in np.linspace(qa.real, qb.real, 17):
            u = mass.u.eval_jet(complex(q, qa.imag), 0).value
            weierstrass_p(u, config.g2, config.g3)


def to_gauged_data(config: TypeAConfig) -> GaugedData:
    """Input for the generic construction: canonical A, matching B and C,
    monomial basis."""
    N = config.N
    A = config.A_z()
    Q = config.Q_z()
    B = Q - 0.5 * (N - 2) * Deriv(A, 1)
    C = ((N - 1) * (N - 2) / 12.0) * Deriv(A, 2) \
        - 0.5 * (N - 1) * Deriv(Q, 1) + Const(config.R)
    z = Var()
    basis = [PowInt(z, k) if k else Const(1.0) + 0 * z for k in range(N)]
    return GaugedData(A=A, B=B, C=C, basis=basis, N=N, monomial=True)


_SELFTEST_DONE = False


def build_type_a(config: TypeAConfig, mass: MassProfile,
                 u_window: tuple | None = None,
                 window: tuple | None = None) -> TypeASystem:
    """Assemble the type A system from the closed per-case forms.

    The supercharge is the ordered product of first-order factors
    d/dq + W - N m'/4m + (N-1-2k) E/2 (k = N-1 leftmost), scaled by
    m^(-N/2); the partner pair comes from the W/E closed form; sectors are
    exp(-gauge potential) times the monomials in z(q), with the leading
    function normalized to 1 at the window anchor.
    """
    if window is None:
        window = window_from_u(config, mass, u_window)
    _check_window_clear(config, mass, window)
    N = config.N
    qa, qb = window
    q_anchor = 0.5 * (complex(qa) + complex(qb))

    f_u = config.f_of_u()
    zmap = ClosedZMap(f_u, mass)
    m = mass.m
    u_fn = mass.u
    Q_z = config.Q_z()

    def e_ev(q0, order):
        zj = zmap.jet_at(q0, order + 2)
        z1 = zj.derivative()
        return z1.derivative() / z1.truncate(order)

    def w_ev(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        mj = m.eval_jet(q0, order)
        qz = jets.compose(Q_z.eval_jet(zj.value, order), zj.truncate(order))
        return -1.0 * mj * qz / zj.derivative().truncate(order)

    E_fn = CallableFn(e_ev, name="E", memo=True)
    W_fn = CallableFn(w_ev, name="W", memo=True)

    # gauge potentials, anchored to 0
    S_u = config.gauge_integral_u()
    fprime_u = Deriv(f_u, 1)

    def w_gauge_raw(sign):
        G = 0.5 * (N - 1) * scalarfn.log(fprime_u) + sign * S_u

        def ev(q0, order):
            uj = u_fn.eval_jet(q0, order)
            mj = m.eval_jet(q0, order)
            return -0.25 * jets.log(mj) + jets.compose(
                G.eval_jet(uj.value, order), uj)
        return ev

    def anchored(fn_raw, name):
        off = fn_raw(q_anchor, 0).value
        return CallableFn(lambda q0, order: fn_raw(q0, order) - off,
                          name=name, memo=True)

    w_minus = anchored(w_gauge_raw(-1), "W_gauge_minus")
    w_plus = anchored(w_gauge_raw(+1), "W_gauge_plus")

    # partner potentials
    def u_pot(sign):
        def ev(q0, order):
            Wj = W_fn.eval_jet(q0, order + 1)
            Ej = E_fn.eval_jet(q0, order + 1)
            mj = m.eval_jet(q0, order + 2)
            W0 = Wj.truncate(order)
            E0 = Ej.truncate(order)
            m0 = mj.truncate(order)
            m1 = mj.derivative().truncate(order)
            m2 = mj.derivative(2).truncate(order)
            W1 = Wj.derivative()
            E1 = Ej.derivative()
            # divide by m stepwise: m can be legitimately tiny while m^2,
            # m^3 would fall below the singularity floor
            m1_rel = m1 / m0
            return (0.5 * W0 * W0 / m0
                    - ((N * N - 1) / 24.0) * (2.0 * E1 - E0 * E0) / m0
                    + ((N * N + 2) / 24.0) * (m2 / m0) / m0
                    - ((5.0 * N * N + 16) / 96.0) * m1_rel * m1_rel / m0
                    + sign * N * (0.5 * W1 / m0
                                  - 0.25 * m1_rel * W0 / m0)
                    - config.R)
        return CallableFn(ev, name=f"U{'+' if sign > 0 else '-'}", memo=True)

    U_minus = u_pot(-1)
    U_plus = u_pot(+1)
    H_minus = pdm_hamiltonian(mass, U_minus)
    H_plus = pdm_hamiltonian(mass, U_plus)

    # supercharge: ordered first-order factors, k = N-1 leftmost
    m1_over = Deriv(m, 1) / PowInt(m, 1)

    def factor_coeff(k):
        def ev(q0, order):
            Wj = W_fn.eval_jet(q0, order)
            Ej = E_fn.eval_jet(q0, order)
            mj = m.eval_jet(q0, order + 1)
            corr = mj.derivative().truncate(order) / mj.truncate(order)
            return Wj - 0.25 * N * corr + 0.5 * (N - 1 - 2 * k) * Ej
        return CallableFn(ev, memo=True)

    factors = [LinearDiffOp([factor_coeff(k), 1.0])
               for k in range(N - 1, -1, -1)]
    P_N = compose(MultiplyOp(PowReal(m, -0.5 * N)), *factors)
    P_N_t = P_N.transpose()

    # sectors: exp(-gauge) monomials, leading function 1 at the anchor
    def sector_fn(w_gauge, k):
        def ev(q0, order):
            zj = zmap.jet_at(q0, order)
            wj = w_gauge.eval_jet(q0, order)
            return jets.exp(-1.0 * wj) * jets.pow_int(zj, k)
        return CallableFn(ev, name=f"sector_{k}", memo=True)

    sector_minus = [sector_fn(w_minus, k) for k in range(N)]
    sector_plus = [sector_fn(w_plus, k) for k in range(N)]

    def w_top_ev(q0, order):
        Wj = W_fn.eval_jet(q0, order)
        mj = m.eval_jet(q0, order + 1)
        m0 = mj.truncate(order)
        m1 = mj.derivative().truncate(order)
        return (N * jets.powr(m0, -0.5 * N) * Wj
                - 0.25 * N * N * jets.powr(m0, -0.5 * (N + 2)) * m1)

    w_top = CallableFn(w_top_ev, name="w_top", memo=True)

    def g_ev(q0, order):
        zj = zmap.jet_at(q0, order + 1)
        mj = m.eval_jet(q0, order)
        return jets.powr(mj, -0.5 * N) * \
            jets.pow_int(zj.derivative().truncate(order), N)

    data = to_gauged_data(config)
    z0 = zmap(q_anchor)
    system = TypeASystem(
        N=N, data=data, mass=mass,
        anchors=Anchors(q_anchor, z0, _branch_sign(f_u, mass, q_anchor)),
        window=window,
        H_minus=H_minus, H_plus=H_plus, P_N=P_N, P_N_t=P_N_t,
        U_minus=U_minus, U_plus=U_plus,
        W_gauge_minus=w_minus, W_gauge_plus=w_plus,
        z_of_q=zmap, sector_minus=sector_minus,
        E_fn=E_fn, W_fn=W_fn, w_top=w_top,
        g_fn=CallableFn(g_ev, name="g", memo=True),
        delta_C=CallableFn(
            lambda q0, order: -1.0 * (U_plus.eval_jet(q0, order)
                                      - U_minus.eval_jet(q0, order)),
            name="delta_C"),
        _sector_plus=sector_plus,
        config=config, f_of_u=f_u, u_of_q=mass.u,
        is_solvable=config.is_solvable,
    )
    _sign_selftest_once()
    return system


def _branch_sign(f_u: ScalarFunction, mass: MassProfile,
                 q0: complex) -> int:
    uj = mass.u.eval_jet(q0, 1)
    fp = f_u.eval_jet(uj.value, 1).derivative_value(1)
    slope = fp * uj.derivative_value(1)
    return 1 if slope.real >= 0 else -1


def builder_system(config: TypeAConfig, mass: MassProfile,
                   u_window: tuple | None = None,
                   window: tuple | None = None) -> BuiltSystem:
    """The same model through the generic construction (cross-validation)."""
    if window is None:
        window = window_from_u(config, mass, u_window)
    qa, qb = window
    q0 = 0.5 * (complex(qa) + complex(qb))
    f_u = config.f_of_u()
    u0 = mass.u.eval_jet(q0, 0).value
    z0 = f_u.eval_jet(u0, 0).value
    anch = Anchors(q_anchor=q0, z_anchor=z0,
                   branch=_branch_sign(f_u, mass, q0))
    return builder.build(to_gauged_data(config), mass, anch, window)


# -- literal per-case closed forms -------------------------------------------

def _mass_correction(mass: MassProfile, q: complex) -> complex:
    mj = mass.m.eval_jet(q, 2)
    m0 = mj.value
    m1 = mj.derivative_value(1)
    m2 = mj.derivative_value(2)
    return m2 / (8.0 * m0 ** 2) - 7.0 * m1 ** 2 / (32.0 * m0 ** 3)


def case_v_eta(config: TypeAConfig, sign: int,
               variant: str = "printed") -> list[complex]:
    """Coupling constants of the case V potential, per pole.

    'printed' is the literal display; 'residue' is
    Q(e_l)^2 + sign*2N H_l^2 Q(e_l) + (N^2-1) H_l^4.
    """
    N = config.N
    b2, b1, b0 = config.b
    out = []
    for e, h2 in zip(config.e_roots(), config.h_sq()):
        if variant == "residue":
            qe = config.Q_of(e)
            out.append(qe * qe + sign * 2.0 * N * h2 * qe
                       + (N * N - 1.0) * h2 * h2)
        else:
            out.append(
                -b2 * e * (b2 * e - 2.0 * b1) * (2.0 * h2 - 5.0 * e * e)
                + (b1 * b1 + 2.0 * b2 * b0) * e * e
                - 2.0 * b1 * b0 * e + b0 * b0
                + (N * N - 1.0) * (h2 * h2 - 18.0 * e * e * h2
                                   + 36.0 * e ** 4)
                - sign * 2.0 * N * ((b2 * e - b1)
                                    * (5.0 * h2 - 12.0 * e * e) * e
                                    - b0 * h2))
    return out


def case_potential(config: TypeAConfig, mass: MassProfile, sign,
                   q: complex, variant: str = "printed") -> complex:
    """Literal per-case effective potential at one point.

    `sign` is +1/-1 (or "plus"/"minus") selecting the partner. The mass
    enters through u(q) and the additive correction m''/8m^2 - 7m'^2/32m^3.
    """
    s = _sign_of(sign)
    N = config.N
    b2, b1, b0 = config.b
    u = mass.u.eval_jet(q, 0).value
    corr = _mass_correction(mass, q) - config.R
    if config.case == "I":
        Qu = b2 * u * u + b1 * u + b0
        return (0.5 * Qu * Qu - s * N * b2 * u - s * N * b1 / 2.0) + corr
    if config.case == "II":
        if abs(u) < 1e-9:
            raise CaseSingularity("case II potential pole at u = 0")
        return ((b2 ** 2 / 8.0) * u ** 6 + (b2 * b1 / 4.0) * u ** 4
                + 0.125 * (b1 * b1 + 2.0 * b0 * b2 - s * 6.0 * N * b2) * u * u
                + (N - 1.0 + s * b0) * (N + 1.0 + s * b0) / (8.0 * u * u)
                - s * N * b1 / 4.0 + b0 * b1 / 4.0) + corr
    if config.case == "III":
        nu = config.nu
        r = cmath.sqrt(nu)
        E2 = cmath.exp(2.0 * r * u)
        return ((b2 ** 2 / (8 * nu)) * E2 * E2
                + (b2 / (4 * nu)) * (b1 - s * 2.0 * N * nu) * E2
                + (b0 / (4 * nu)) * (b1 + s * 2.0 * N * nu) / E2
                + (b0 ** 2 / (8 * nu)) / (E2 * E2)
                + (b1 * b1 + 2.0 * b2 * b0) / (8.0 * nu)
                + ((N * N - 1.0) / 6.0) * nu) + corr
    if config.case == "IV":
        nu = config.nu
        r = cmath.sqrt(nu)
        sh2 = cmath.sinh(2.0 * r * u)
        sh1 = cmath.sinh(r * u)
        if min(abs(sh1), abs(sh2)) < 1e-9:
            raise CaseSingularity("case IV potential pole at sinh zero")
        return ((b2 ** 2 / (8 * nu)) * sh2 * sh2
                + (b2 * (b1 - s * 2.0 * N * nu) / (2 * nu)) * sh1 * sh1
                + ((b2 + b0) * (b1 + s * 2.0 * N * nu)) / (8 * nu * sh1 * sh1)
                + ((b2 + b0 - b1 - s * 2.0 * (N - 1) * nu)
                   * (b2 + b0 - b1 - s * 2.0 * (N + 1) * nu))
                / (8 * nu * sh2 * sh2)
                - s * N * b2 / 2.0
                + (2.0 * b2 * (b2 + b0 + b1) + b1 * b1) / (8.0 * nu)
                + ((N * N - 1.0) / 6.0) * nu) + corr
    # case V
    p, _ = weierstrass_p(u, config.g2, config.g3)
    etas = case_v_eta(config, s, variant)
    total = 0.0 + 0.0j
    for e, h2, eta in zip(config.e_roots(), config.h_sq(), etas):
        total += eta / (8.0 * h2 * (p - e))
    total += ((N - 1.0 - s * b2) * (N + 1.0 - s * b2) / 8.0) * p
    total += s * N * b1 / 4.0 + b2 * b1 / 4.0
    return total + corr


def case_sector(config: TypeAConfig, mass: MassProfile, sign,
                variant: str = "printed",
                anchor: complex | None = None) -> list:
    """Literal per-case sector functions of q (list of CallableFn).

    Principal branches replace the absolute values of the printed forms so
    complex parameters stay meaningful; 'residue' flips the sign of the
    b1-linked exponent in case V (see module docstring). When `anchor` is
    given, the family is scaled so the leading function is 1 there.
    """
    s = _sign_of(sign)
    N = config.N
    b2, b1, b0 = config.b
    u = Var()

    if config.case == "I":
        pre_u = scalarfn.exp(-s * ((b2 / 3.0) * u ** 3
                                   + (b1 / 2.0) * u * u + b0 * u))
        gens_u = [PowInt(u, k) if k else Const(1.0) + 0 * u for k in range(N)]
    elif config.case == "II":
        pre_u = PowReal(u, -0.5 * (N - 1.0 + s * b0)) * \
            scalarfn.exp(-s * ((b2 / 8.0) * u ** 4 + (b1 / 4.0) * u * u))
        gens_u = [PowInt(u, 2 * k) if k else Const(1.0) + 0 * u
                  for k in range(N)]
    elif config.case == "III":
        nu = config.nu
        r = cmath.sqrt(nu)
        pre_u = scalarfn.exp(
            -s * (b2 / (4 * nu)) * scalarfn.exp(2 * r * u)
            + s * (b0 / (4 * nu)) * scalarfn.exp(-2 * r * u)
            - ((2.0 * (N - 1) * nu + s * b1) / (2.0 * r)) * u)
        gens_u = [scalarfn.exp(2 * k * r * u) if k else Const(1.0) + 0 * u
                  for k in range(N)]
    elif config.case == "IV":
        nu = config.nu
        r = cmath.sqrt(nu)
        pre_u = (PowReal(scalarfn.sinh(2 * r * u), -0.5 * (N - 1) - s * b1 / (4 * nu))
                 * PowReal(scalarfn.tanh(r * u), -s * (b2 + b0) / (4 * nu))
                 * scalarfn.exp(-s * (b2 / (4 * nu)) * scalarfn.cosh(2 * r * u)))
        ch = scalarfn.cosh(2 * r * u)
        gens_u = [PowInt(ch, k) if k else Const(1.0) + 0 * u for k in range(N)]
    else:
        wp = config.f_of_u()
        pre_u = Const(1.0) + 0 * u
        for e, h2 in zip(config.e_roots(), config.h_sq()):
            if variant == "residue":
                kap = (b2 * e * e + b1 * e + b0) / (4.0 * h2)
            else:
                kap = (b2 * e * e - b1 * e + b0) / (4.0 * h2)
            pre_u = pre_u * PowReal(wp - e, -0.25 * (N - 1) - s * kap)
        gens_u = [PowInt(wp, k) if k else Const(1.0) + 0 * u for k in range(N)]

    m = mass.m

    def make(k):
        g = pre_u * gens_u[k]

        def ev(q0, order):
            uj = mass.u.eval_jet(q0, order)
            mj = m.eval_jet(q0, order)
            return jets.powr(mj, 0.25) * jets.compose(
                g.eval_jet(uj.value, order), uj)
        return CallableFn(ev, name=f"case_sector_{k}", memo=True)

    fns = [make(k) for k in range(N)]
    if anchor is not None:
        norm = fns[0].eval_jet(anchor, 0).value
        fns = [CallableFn(
            (lambda f: lambda q0, order: f.eval_jet(q0, order) / norm)(f),
            name=f.name, memo=True) for f in fns]
    return fns


def _sign_of(sign) -> int:
    if sign in (1, +1, "plus", "+"):
        return 1
    if sign in (-1, "minus", "-"):
        return -1
    raise BadParams(f"sign must be +1/-1/'plus'/'minus', got {sign!r}")


# -- structural condition residuals -------------------------------------------

def verify_type_a_conditions(system: TypeASystem, samples,
                             corrupt_w=None) -> dict:
    """Residuals of the q-space structural conditions.

    First condition (needs N >= 2): (d-E) d (d+E) applied to W/m vanishes.
    Second (needs N >= 3): (d-2E)(d-E) d (d+E) applied to E/m - m'/2m^2
    vanishes. Residuals are relative to the term-magnitude envelope.
    `corrupt_w` (a ScalarFunction added to W) exists for negative controls.
    """
    E = system.E_fn
    W = system.W_fn
    m = system.mass.m

    def w_over_m(q0, order):
        wj = W.eval_jet(q0, order)
        if corrupt_w is not None:
            wj = wj + corrupt_w.eval_jet(q0, order)
        return wj / m.eval_jet(q0, order)

    def e_over_m(q0, order):
        return E.eval_jet(q0, order) / m.eval_jet(q0, order)

    def half_mass_slope(q0, order):
        mj = m.eval_jet(q0, order + 1)
        m0 = mj.truncate(order)
        return 0.5 * (mj.derivative().truncate(order) / m0) / m0

    def residual(e_multiples, parts, samples):
        # apply first-order factors (d/dq + a E) right-to-left to every
        # uncancelled ingredient, tracking the largest stage magnitude:
        # this keeps the relative measure meaningful when the input, or
        # any intermediate stage, collapses to rounding noise
        order = len(e_multiples)
        worst = 0.0
        for q in samples:
            ej = E.eval_jet(q, order)
            total = None
            env = 0.0
            for sign, part in zip((1.0, -1.0, -1.0), parts):
                g = CallableFn(part).eval_jet(q, order)
                for a in reversed(e_multiples):
                    stage = abs(g.derivative_value(1)) \
                        + abs(a) * abs(ej.value) * abs(g.value) \
                        + abs(g.value)
                    env = max(env, stage)
                    coeff = (a * ej).truncate(g.order - 1)
                    g = g.derivative() + coeff * g.truncate(g.order - 1)
                env = max(env, abs(g.value))
                total = sign * g if total is None else total + sign * g
            worst = max(worst, abs(total.value) / max(env, 1e-30))
        return worst

    out = {"condition_Q": None, "condition_A": None}
    if system.N >= 2:
        out["condition_Q"] = residual([-1.0, 0.0, 1.0], [w_over_m], samples)
    if system.N >= 3:
        out["condition_A"] = residual([-2.0, -1.0, 0.0, 1.0],
                                      [e_over_m, half_mass_slope], samples)
    return out


# -- sign-convention self-test -------------------------------------------------

def _sign_selftest_once() -> None:
    """One-time consistency check of the sign pairing.

    Asserts together: the gauge split (W = (W- ' - W+ ')/2), kernel
    membership of the minus sector, and the intertwining direction, on the
    reference constant-mass case I pair.
    """
    global _SELFTEST_DONE
    if _SELFTEST_DONE:
        return
    _SELFTEST_DONE = True
    cfg = TypeAConfig(N=2, b=(0.0, -2.0, 0.0), R=0.0, case="I")
    mass = scalarfn.builtin_mass_profile("constant")
    sys_ = build_type_a(cfg, mass, u_window=(0.35, 1.45))
    pts = [0.5, 0.9, 1.3]
    for q in pts:
        wm = sys_.W_gauge_minus.eval_jet(q, 1).derivative_value(1)
        wp = sys_.W_gauge_plus.eval_jet(q, 1).derivative_value(1)
        w = sys_.W_fn.eval_jet(q, 0).value
        assert abs(0.5 * (wm - wp) - w) < 1e-9 * (1 + abs(w)), \
            "gauge split sign convention broken"
        for phi in sys_.sector_minus:
            val = sys_.P_N.apply_jet(phi.eval_jet(q, sys_.N)).value
            assert abs(val) < 1e-9, "minus sector not annihilated"
        z = Var()
        psi = (1 + z + z * z) * scalarfn.exp(-0.25 * z * z)
        lhs = sys_.P_N.apply_jet(sys_.H_minus.apply_jet(
            psi.eval_jet(q, sys_.N + 4))).value
        rhs = sys_.H_plus.apply_jet(sys_.P_N.apply_jet(
            psi.eval_jet(q, sys_.N + 4))).value
        assert abs(lhs - rhs) < 1e-8 * (1 + abs(lhs)), \
            "intertwining direction broken"
