import cmath

import mpmath
import numpy as np
import pytest

from pdmsusy import jets
from pdmsusy.errors import OrderTooLow, SingularJet
from pdmsusy.jets import Jet, jet_arith, jet_const, jet_func, jet_variable

from helpers import jet_vs_fd


def rand_jet(rng, order=6, base=0.4, floor=0.0):
    c = rng.normal(size=order + 1) + 1j * rng.normal(size=order + 1)
    if floor:
        c[0] += floor * (1 if c[0].real >= 0 else -1)
    return Jet(base, c)


class TestVariable:
    def test_identity(self):
        j = jet_variable(3.0, 2)
        assert np.allclose(j.coeffs, [3.0, 1.0, 0.0])

    def test_zeroth_order(self):
        j = jet_variable(0.0, 0)
        assert np.allclose(j.coeffs, [0.0])

    def test_complex_base(self):
        j = jet_variable(1 + 2j, 3)
        assert np.allclose(j.coeffs, [1 + 2j, 1, 0, 0])

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            jet_variable(0.0, -1)


class TestArithmetic:
    def test_exp_series_at_zero(self):
        e = jets.exp(jet_variable(0.0, 3))
        assert np.allclose(e.coeffs, [1, 1, 0.5, 1 / 6])

    def test_square_of_identity(self):
        x = jet_variable(2.0, 2)
        assert np.allclose((x * x).coeffs, [4, 4, 1])

    def test_named_dispatch(self):
        x = jet_variable(2.0, 2)
        assert np.allclose(jet_arith(x, x, "mul").coeffs, [4, 4, 1])
        assert np.allclose(jet_func(jet_variable(0.0, 2), "exp").coeffs,
                           [1, 1, 0.5])
        assert np.allclose(
            jet_func(jet_variable(4.0, 1), "pow_r", r=0.5).coeffs,
            [2.0, 0.25])
        with pytest.raises(ValueError):
            jet_arith(x, x, "frobnicate")

    def test_sin_of_square_vs_finite_differences(self):
        x = jet_variable(0.7, 4)
        j = jets.sin(x * x)
        err = jet_vs_fd(j, lambda q: mpmath.sin(q * q))
        assert err < 1e-6

    def test_scalar_broadcast(self):
        x = jet_variable(1.5, 3)
        assert np.allclose((x + 1).coeffs, (x + jet_const(1, 3, 1.5)).coeffs)
        assert np.allclose((2 * x).coeffs, (x + x).coeffs)
        assert np.allclose((1 / x).value, 1 / 1.5)

    def test_order_mismatch_rejected(self):
        with pytest.raises(OrderTooLow):
            jet_variable(0.0, 3) + jet_variable(0.0, 2)

    def test_base_mismatch_rejected(self):
        with pytest.raises(ValueError):
            jet_variable(0.0, 3) + jet_variable(1.0, 3)


PRIMITIVES = [
    ("exp", jets.exp, mpmath.exp, 0.6),
    ("ln", jets.log, mpmath.log, 1.7),
    ("sqrt", jets.sqrt, mpmath.sqrt, 2.3),
    ("sin", jets.sin, mpmath.sin, 0.9),
    ("cos", jets.cos, mpmath.cos, 0.9),
    ("sinh", jets.sinh, mpmath.sinh, 0.4),
    ("cosh", jets.cosh, mpmath.cosh, 0.4),
    ("tanh", jets.tanh, mpmath.tanh, 0.3),
    ("recip", jets.recip, lambda z: 1 / z, 1.4),
]


@pytest.mark.parametrize("name,ours,ref,shift", PRIMITIVES,
                         ids=[p[0] for p in PRIMITIVES])
def test_primitives_vs_finite_differences(name, ours, ref, shift):
    rng = np.random.default_rng(hash(name) % 2 ** 31)
    for _ in range(5):
        base = shift + rng.uniform(0.0, 0.5)
        inner = jet_variable(base, 4)
        # composite argument exercises the chain rule too
        arg = inner * inner * 0.5 + inner
        f = lambda q: ref(0.5 * q * q + q)  # noqa: E731
        assert jet_vs_fd(ours(arg), f) < 1e-6


def test_powr_vs_finite_differences():
    for r in (0.5, -1.5, 1 + 0.5j):
        j = jets.powr(jet_variable(1.8, 4), r)
        err = jet_vs_fd(j, lambda q: mpmath.power(q, r))
        assert err < 1e-6


class TestRingAxioms:
    def test_random_jets(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rand_jet(rng)
            b = rand_jet(rng)
            c = rand_jet(rng)
            lhs = (a * b) * c
            rhs = a * (b * c)
            scale = np.max(np.abs(lhs.coeffs)) + 1.0
            assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12 * scale
            lhs = a * (b + c)
            rhs = a * b + a * c
            assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12 * scale

    def test_div_undoes_mul(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = rand_jet(rng)
            b = rand_jet(rng, floor=1.0)
            back = (a * b) / b
            scale = np.max(np.abs(a.coeffs)) + 1.0
            assert np.max(np.abs(back.coeffs - a.coeffs)) < 1e-12 * scale

    def test_order_is_stable(self):
        rng = np.random.default_rng(13)
        a = rand_jet(rng, order=5)
        b = rand_jet(rng, order=5, floor=1.0)
        for result in (a + b, a - b, a * b, a / b, jets.exp(a)):
            assert result.order == 5


class TestSingularities:
    def test_div_floor(self):
        tiny = jet_const(1e-14, 3)
        with pytest.raises(SingularJet):
            jet_variable(0.0, 3) / tiny

    def test_log_floor(self):
        with pytest.raises(SingularJet):
            jets.log(jet_const(1e-13, 2))

    def test_sqrt_floor(self):
        with pytest.raises(SingularJet):
            jets.sqrt(jet_const(0.0, 2))

    def test_recip_floor(self):
        with pytest.raises(SingularJet):
            jets.recip(jet_const(1e-15, 2))


class TestCalculus:
    def test_derivative_shift(self):
        x = jet_variable(0.3, 5)
        j = jets.exp(x)
        d = j.derivative()
        assert d.order == 4
        assert abs(d.value - cmath.exp(0.3)) < 1e-14

    def test_antiderivative_roundtrip(self):
        rng = np.random.default_rng(14)
        a = rand_jet(rng)
        back = a.antiderivative(3.0).derivative()
        assert np.allclose(back.coeffs, a.coeffs)

    def test_derivative_value_needs_order(self):
        with pytest.raises(OrderTooLow):
            jet_variable(0.0, 2).derivative_value(3)

    def test_compose(self):
        # exp(sin(q)) at 0.5 via compose vs direct evaluation
        inner = jets.sin(jet_variable(0.5, 6))
        outer = jets.exp(jet_variable(inner.value, 6))
        composed = jets.compose(outer, inner)
        direct = jets.exp(inner)
        assert np.max(np.abs(composed.coeffs - direct.coeffs)) < 1e-13

    def test_compose_base_mismatch(self):
        inner = jet_variable(0.5, 3)
        outer = jets.exp(jet_variable(2.5, 3))
        with pytest.raises(ValueError):
            jets.compose(outer, inner)


def test_backend_parity():
    from pdmsusy import _jetcore_py
    try:
        from pdmsusy import _jetcore
    except ImportError:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(21)
    a = rng.normal(size=11) + 1j * rng.normal(size=11)
    b = rng.normal(size=11) + 1j * rng.normal(size=11)
    b[0] += 2.5
    d = a.copy()
    d[0] = 0.0
    pairs = [
        (_jetcore.mul(a, b), _jetcore_py.mul(a, b)),
        (_jetcore.div(a, b), _jetcore_py.div(a, b)),
        (_jetcore.exp_(a), _jetcore_py.exp_(a)),
        (_jetcore.log_(b), _jetcore_py.log_(b)),
        (_jetcore.sqrt_(b), _jetcore_py.sqrt_(b)),
        (_jetcore.powr(b, 0.5 - 1.2j), _jetcore_py.powr(b, 0.5 - 1.2j)),
        (_jetcore.compose(b, d), _jetcore_py.compose(b, d)),
    ]
    pairs += list(zip(_jetcore.sin_cos(a), _jetcore_py.sin_cos(a)))
    pairs += list(zip(_jetcore.sinh_cosh(a), _jetcore_py.sinh_cosh(a)))
    for got, want in pairs:
        scale = np.max(np.abs(want)) + 1.0
        assert np.max(np.abs(got - want)) < 1e-13 * scale
