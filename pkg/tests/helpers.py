"""Independent numeric oracles used across the tests.

Derivatives come from mpmath's high-precision central finite differences,
so they share nothing with the package's Taylor recurrences. The
Weierstrass reference value goes through Jacobi elliptic functions.
"""

import mpmath
import numpy as np


def fd_derivatives(f, x0, kmax, dps=40):
    """[f(x0), f'(x0), ..., f^(kmax)(x0)] by high-precision central
    finite differences (step method)."""
    out = []
    with mpmath.workdps(dps):
        z0 = mpmath.mpc(x0)
        for k in range(kmax + 1):
            out.append(complex(mpmath.diff(f, z0, k)))
    return out


def jet_vs_fd(jet, f, rel=1e-6):
    """Max relative error of jet derivatives 0..order against the oracle."""
    ref = fd_derivatives(f, jet.base, jet.order)
    worst = 0.0
    for k, want in enumerate(ref):
        got = jet.derivative_value(k)
        worst = max(worst, abs(got - want) / (1.0 + abs(want)))
    return worst


def wp_reference(u, g2, g3, dps=30):
    """Weierstrass elliptic value via Jacobi sn (independent route).

    Valid for real invariants with three real roots e1 > e2 > e3:
    wp(u) = e3 + (e1 - e3) / sn(u sqrt(e1 - e3), m)^2, m = (e2-e3)/(e1-e3).
    """
    roots = sorted(np.roots([4.0, 0.0, -g2, -g3]).real, reverse=True)
    e1, e2, e3 = roots
    with mpmath.workdps(dps):
        k2 = (e2 - e3) / (e1 - e3)
        sn = mpmath.ellipfun("sn", mpmath.mpc(u) * mpmath.sqrt(e1 - e3), k2)
        return complex(e3 + (e1 - e3) / sn ** 2)


def quad_reference(f, a, b, dps=30):
    """High-precision quadrature reference (mpmath.quad)."""
    with mpmath.workdps(dps):
        return complex(mpmath.quad(f, [a, b]))
