import numpy as np
import pytest

from pdmsusy import diffop as do
from pdmsusy import scalarfn as sf
from pdmsusy.diffop import (LinearDiffOp, MultiplyOp, annihilator_from_basis,
                            apply, coeff_jets, compose, kernel_basis,
                            term_scale, transpose)
from pdmsusy.errors import DegenerateBasis, OrderTooLow
from pdmsusy.scalarfn import quad

Q = sf.var()
ONE = sf.const(1.0) + 0 * Q


def gaussian_bump(center=0.0, width=1.0):
    return (1 + Q + Q * Q) * sf.exp(-((Q - center) / width) ** 2)


class TestApply:
    def test_plain_derivative(self):
        assert apply(do.d_dq(), Q * Q, 2.0) == 4.0

    def test_euler_operator(self):
        op = LinearDiffOp([1.0, Q])
        assert apply(op, Q ** 3, 1.0) == 4.0

    def test_scaled_derivative_with_mass(self):
        m = sf.exp(2 * Q)
        op = LinearDiffOp([0.0, sf.PowReal(m, -0.5)])
        assert abs(apply(op, sf.exp(Q), 0.0) - 1.0) < 1e-14

    def test_jet_input_and_order_guard(self):
        op = LinearDiffOp([0.0, 0.0, 1.0])
        f = (Q ** 3).eval_jet(1.0, 2)
        assert apply(op, f, 1.0) == 6.0
        with pytest.raises(OrderTooLow):
            apply(op, (Q ** 3).eval_jet(1.0, 1), 1.0)


class TestCompose:
    def test_second_derivative(self):
        dd = compose(do.d_dq(), do.d_dq())
        assert apply(dd, Q ** 3, 1.0) == 6.0

    def test_leibniz(self):
        op = compose(do.d_dq(), MultiplyOp(Q))
        for q0 in (0.5, -1.2):
            assert abs(apply(op, Q, q0) - 2 * q0) < 1e-14

    def test_harmonic_factorization(self):
        op = compose(LinearDiffOp([-1 * Q, 1.0]), LinearDiffOp([Q, 1.0]))
        val = apply(op, sf.exp(-0.5 * Q * Q), 0.3)
        assert abs(val) < 1e-15

    def test_associativity(self):
        a = LinearDiffOp([sf.sin(Q), 1.0])
        b = LinearDiffOp([Q, sf.exp(Q)])
        c = LinearDiffOp([1.0, 0.0, 0.5])
        f = gaussian_bump()
        left = compose(compose(a, b), c)
        right = compose(a, compose(b, c))
        for q0 in np.linspace(-1.2, 1.2, 7):
            x = apply(left, f, q0)
            y = apply(right, f, q0)
            assert abs(x - y) < 1e-10 * (1 + abs(x))


class TestTranspose:
    def test_order_zero_is_fixed(self):
        op = MultiplyOp(sf.cos(Q))
        f = gaussian_bump()
        for q0 in (0.2, 1.0):
            assert apply(op, f, q0) == apply(transpose(op), f, q0)

    def test_first_order_sign(self):
        op = LinearDiffOp([0.0, Q])
        # (q d)^t psi = -(q psi)': at psi = q^2, q0 = 1 gives -3
        assert abs(apply(transpose(op), Q * Q, 1.0) + 3.0) < 1e-14

    def test_involution(self):
        op = LinearDiffOp([Q, 1 + Q * Q, sf.exp(Q)])
        opTT = transpose(transpose(op))
        f = gaussian_bump()
        for q0 in np.linspace(-1.5, 1.5, 10):
            a = apply(op, f, q0)
            b = apply(opTT, f, q0)
            assert abs(a - b) < 1e-10 * (1 + abs(a))

    def test_product_rule(self):
        a = LinearDiffOp([sf.sin(Q), 1.0])
        b = LinearDiffOp([Q, sf.cos(Q)])
        f = gaussian_bump()
        lhs = transpose(compose(a, b))
        rhs = compose(transpose(b), transpose(a))
        for q0 in (0.4, -0.9):
            x = apply(lhs, f, q0)
            y = apply(rhs, f, q0)
            assert abs(x - y) < 1e-12 * (1 + abs(x))

    def test_adjoint_under_integral(self):
        # integral of (P f) g - f (P^t g) vanishes for decaying functions
        op = LinearDiffOp([Q, sf.sin(Q), 1.0, 0.25])
        f = gaussian_bump(0.3, 1.2)
        g = (1 - Q) * sf.exp(-((Q + 0.1) / 0.9) ** 2)

        def integrand(t):
            lhs = apply(op, f, t) * g(t)
            rhs = f(t) * apply(transpose(op), g, t)
            return lhs - rhs

        val = quad(integrand, -12.0, 12.0, tol=1e-9)
        assert abs(val) < 1e-6


class TestCoeffExpansion:
    def test_composition_coefficients(self):
        op = compose(do.d_dq(), MultiplyOp(Q))
        cs = coeff_jets(op, 1.5, 1)
        assert abs(cs[0].value - 1.0) < 1e-14
        assert abs(cs[1].value - 1.5) < 1e-14

    def test_transpose_coefficients(self):
        op = LinearDiffOp([0.0, Q])
        cs = coeff_jets(transpose(op), 2.0, 0)
        # (q d)^t = -d q. = -(1 + q d)
        assert abs(cs[0].value + 1.0) < 1e-14
        assert abs(cs[1].value + 2.0) < 1e-14

    def test_term_scale_envelope(self):
        op = LinearDiffOp([-1 * Q, 1.0])
        f = sf.exp(Q).eval_jet(0.5, 1)
        want = abs(0.5 * np.exp(0.5)) + abs(np.exp(0.5))
        assert abs(term_scale(op, f) - want) < 1e-12


class TestAnnihilator:
    def test_affine_basis(self):
        ann = annihilator_from_basis([ONE, Q])
        assert abs(apply(ann, Q * Q, 5.0) - 2.0) < 1e-12

    def test_monomials_cubic(self):
        ann = annihilator_from_basis([ONE, Q, Q * Q])
        assert abs(apply(ann, Q ** 3, 1.0) - 6.0) < 1e-10
        assert abs(ann.log_wronskian_slope(1.0).value) < 1e-12

    def test_sparse_monomials_frozen_values(self):
        # basis {1, z^3}: independent dense-determinant oracle at z = 2
        z0 = 2.0
        rows = lambda fns, k: [  # noqa: E731
            [1.0, z0 ** 3, z0][i] if k == 0 else
            [0.0, 3 * z0 ** 2, 1.0][i] if k == 1 else
            [0.0, 6 * z0, 0.0][i] for i in range(3)]
        full = np.array([rows(None, k) for k in range(3)])
        wron = full[:2, :2]
        expected = np.linalg.det(full) / np.linalg.det(wron)
        ann = annihilator_from_basis([ONE, Q ** 3])
        got = apply(ann, Q, z0)
        assert abs(got - expected) < 1e-12
        assert abs(expected - (-1.0)) < 1e-12
        # top coefficient -(log W)' = -2/z
        assert abs(ann.log_wronskian_slope(z0).value - (-1.0)) < 1e-12

    def test_kernel_property_random_basis(self):
        rng = np.random.default_rng(31)
        coeffs = rng.normal(size=(3, 4))
        basis = []
        for row in coeffs:
            f = sf.const(row[0]) + 0 * Q
            for k, c in enumerate(row[1:], start=1):
                f = f + c * Q ** k
            basis.append(f)
        ann = annihilator_from_basis(basis)
        for phi in basis:
            for z0 in np.linspace(0.5, 2.5, 10):
                f = phi.eval_jet(z0, ann.order)
                val = abs(ann.apply_jet(f).value)
                scale = max(term_scale(ann, f), 1e-30)
                assert val / scale < 1e-9

    def test_degenerate_basis_raises(self):
        ann = annihilator_from_basis([Q, 2 * Q])
        with pytest.raises(DegenerateBasis):
            apply(ann, Q * Q, 1.0)

    def test_scaled_by_g(self):
        ann = annihilator_from_basis([ONE, Q], g=sf.exp(Q))
        val = apply(ann, Q * Q, 0.5)
        assert abs(val - 2.0 * np.exp(0.5)) < 1e-12

    def test_transpose_of_annihilator(self):
        ann = annihilator_from_basis([ONE, Q])
        # d^2 is self-transposed
        f = gaussian_bump()
        for q0 in (0.1, 0.8):
            a = apply(ann, f, q0)
            b = apply(transpose(ann), f, q0)
            assert abs(a - b) < 1e-11 * (1 + abs(a))


class TestKernelBasis:
    def test_oscillator_kernel(self):
        op = LinearDiffOp([1.0, 0.0, 1.0])
        ker = kernel_basis(op, 0.0)
        for q0 in (0.4, 1.1, -0.8):
            assert abs(ker[0].eval_jet(q0, 0).value - np.cos(q0)) < 1e-12
            assert abs(ker[1].eval_jet(q0, 0).value - np.sin(q0)) < 1e-12

    def test_variable_coefficient_kernel(self):
        # y'' - y'/q has kernel {1, q^2} for q > 0
        op = LinearDiffOp([0.0, -1 * sf.PowInt(Q, -1), 1.0])
        ker = kernel_basis(op, 1.0)
        got = ker[1].eval_jet(1.7, 0).value
        # second solution has y(1) = 0, y'(1) = 1: y = (q^2 - 1)/2
        assert abs(got - 0.5 * (1.7 ** 2 - 1)) < 1e-11
