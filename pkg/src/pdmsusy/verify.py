"""Numeric certificates for a built partner pair.

Every check reduces a structural identity to a max residual over a sample
grid, measured against the cancellation envelope of the terms involved
(sum of absolute term magnitudes), so residuals are meaningful relative
quantities independent of the overall scale of the data. All checks are
pure and deterministic given (system, grid, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalarfn
from .builder import BuiltSystem
from .diffop import compose, term_scale
from .errors import IllConditionedBasis, InvarianceViolated, OrderTooLow
from .scalarfn import ScalarFunction

DEFAULT_TOL = {
    "kernel": 1e-8,
    "intertwining": 1e-8,
    "matrix_fit": 1e-8,
    "anticommutator": 1e-6,
    "partner_difference": 1e-8,
    "conditions": 1e-8,
    "mass_independence": 1e-7,
}


@dataclass(frozen=True)
class SampleGrid:
    """Evaluation points plus a characteristic magnitude for residuals."""

    points: tuple
    scale: float = 1.0

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("grid points must be pairwise distinct")
        object.__setattr__(self, "points", pts)


def make_grid(system: BuiltSystem, n: int | None = None,
              margin: float = 0.08) -> SampleGrid:
    """Interior grid over the system window (n defaults to 2N+5)."""
    if n is None:
        n = 2 * system.N + 5
    return SampleGrid(tuple(system.grid(n, margin)))


def seeded_test_functions(system: BuiltSystem, seed: int = 42,
                          count: int = 2) -> list[ScalarFunction]:
    """Polynomial (degree <= N+2) times Gaussian, seeded coefficients.

    The Gaussian is centered on the window with width ~ the half-window,
    so test functions are O(1) on the grid and decay outside it.
    """
    rng = np.random.default_rng(seed)
    qa, qb = system.window
    center = 0.5 * (complex(qa) + complex(qb))
    width = 0.75 * abs(complex(qb) - complex(qa)) / 2.0
    q = scalarfn.var()
    out = []
    for _ in range(count):
        coeff = rng.uniform(-1, 1, system.N + 3) \
            + 1j * rng.uniform(-0.5, 0.5, system.N + 3)
        poly: ScalarFunction = scalarfn.const(coeff[0])
        mono: ScalarFunction = scalarfn.const(1.0)
        for c in coeff[1:]:
            mono = mono * (q - center) / width
            poly = poly + c * mono
        out.append(poly * scalarfn.exp(-((q - center) / width) ** 2))
    return out


def check_kernel(system: BuiltSystem, grid: SampleGrid) -> float:
    """max over sector functions and points of |P_N phi| relative to the
    term envelope of the application."""
    worst = 0.0
    for phi in system.sector_minus:
        for q in grid.points:
            f = phi.eval_jet(q, system.N)
            val = abs(system.P_N.apply_jet(f).value)
            scale = max(term_scale(system.P_N, f), 1e-30)
            worst = max(worst, val / scale)
    return worst


def check_intertwining(system: BuiltSystem, grid: SampleGrid,
                       test_functions=None, seed: int = 42) -> float:
    """Residual of P_N H- = H+ P_N and of the transposed relation."""
    if test_functions is None:
        test_functions = seeded_test_functions(system, seed)
    order = 2 * system.N + 2
    ph = compose(system.P_N, system.H_minus)
    hp = compose(system.H_plus, system.P_N)
    pth = compose(system.P_N_t, system.H_plus)
    hpt = compose(system.H_minus, system.P_N_t)
    worst = 0.0
    for psi in test_functions:
        for q in grid.points:
            f = psi.eval_jet(q, order)
            if f.order < ph.order:
                raise OrderTooLow("test function jet too short")
            a = ph.apply_jet(f).value
            b = hp.apply_jet(f).value
            scale = max(term_scale(ph, f), term_scale(hp, f), 1e-30)
            worst = max(worst, abs(a - b) / scale)
            at = pth.apply_jet(f).value
            bt = hpt.apply_jet(f).value
            scale_t = max(term_scale(pth, f), term_scale(hpt, f), 1e-30)
            worst = max(worst, abs(at - bt) / scale_t)
    return worst


@dataclass
class SpectrumReport:
    """Matrix of the Hamiltonian on a sector basis and its spectrum."""

    matrix: np.ndarray
    eigenvalues: list
    fit_residual: float
    charpoly: list
    condition: float

    def companion_residual(self) -> float:
        roots = sorted((complex(r) for r in np.roots(self.charpoly)),
                       key=_eig_key)
        return max(abs(a - b) for a, b in zip(roots, self.eigenvalues))

    def to_dict(self) -> dict:
        return {
            "matrix": [[_c2l(x) for x in row] for row in self.matrix],
            "eigenvalues": [_c2l(x) for x in self.eigenvalues],
            "fit_residual": float(self.fit_residual),
            "charpoly": [_c2l(x) for x in self.charpoly],
            "condition": float(self.condition),
        }


def _c2l(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


def _eig_key(e: complex):
    return (round(e.real, 12), round(e.imag, 12), abs(e))


def extract_matrix(system: BuiltSystem, sector: str,
                   grid: SampleGrid, fit_tol: float | None = None,
                   cond_cap: float = 1e10) -> SpectrumReport:
    """Matrix H[k,l] with H phi_k = sum_l H[k,l] phi_l by collocation
    least squares over the grid, plus eigenvalues and char polynomial
    det(M - x I)."""
    if sector in ("minus", "-"):
        basis, H = system.sector_minus, system.H_minus
    elif sector in ("plus", "+"):
        basis, H = system.sector_plus, system.H_plus
    else:
        raise ValueError(f"sector must be 'plus' or 'minus', got {sector!r}")
    n = len(basis)
    if len(grid.points) < 2 * n + 1:
        raise ValueError("matrix extraction needs at least 2N+1 grid points")
    phi = np.array([[b.eval_jet(q, 0).value for b in basis]
                    for q in grid.points])
    cond = float(np.linalg.cond(phi))
    if cond > cond_cap:
        raise IllConditionedBasis(
            f"collocation matrix condition {cond:.3e} exceeds {cond_cap:.1e}")
    rows = []
    fit = 0.0
    for b in basis:
        rhs = np.array([H.apply_jet(b.eval_jet(q, 2)).value
                        for q in grid.points])
        sol, *_ = np.linalg.lstsq(phi, rhs, rcond=None)
        scale = max(1.0, float(np.max(np.abs(rhs))))
        fit = max(fit, float(np.max(np.abs(phi @ sol - rhs))) / scale)
        rows.append(sol)
    matrix = np.array(rows)
    if fit_tol is None:
        fit_tol = DEFAULT_TOL["matrix_fit"]
    if fit > fit_tol:
        raise InvarianceViolated(
            f"sector is not preserved: collocation residual {fit:.3e}")
    eigs = sorted((complex(e) for e in np.linalg.eigvals(matrix)),
                  key=_eig_key)
    # det(M - xI) = (-1)^n det(xI - M)
    charpoly = [((-1) ** n) * complex(c) for c in np.poly(matrix)]
    return SpectrumReport(matrix=matrix, eigenvalues=eigs,
                          fit_residual=fit, charpoly=charpoly,
                          condition=cond)


def check_anticommutator(system: BuiltSystem, grid: SampleGrid,
                         test_functions=None, seed: int = 42,
                         reports: dict | None = None) -> dict:
    """Residual of P^t P = 2^N pi(H-) (and P P^t = 2^N pi(H+)).

    pi is the monic characteristic polynomial of the sector matrix. The
    charpoly stored in reports follows det(M - xI), which for odd N is
    -pi; the check evaluates both signs and reports which one holds, so an
    odd-N convention mismatch surfaces as `sign_flipped` instead of a
    silently absorbed factor.
    """
    if test_functions is None:
        test_functions = seeded_test_functions(system, seed, count=3)
    N = system.N
    need = 2 * N + 4
    out = {}
    for side in ("minus", "plus"):
        rep = (reports or {}).get(side) or extract_matrix(
            system, side, grid)
        monic = np.poly(rep.matrix)  # x^N + c1 x^(N-1) + ... (det(xI - M))
        if side == "minus":
            anti = compose(system.P_N_t, system.P_N)
            H = system.H_minus
        else:
            anti = compose(system.P_N, system.P_N_t)
            H = system.H_plus
        worst = 0.0
        for psi in test_functions:
            for q in grid.points:
                f = psi.eval_jet(q, need)
                lhs = anti.apply_jet(f).value
                # Horner: r <- H r + c_i psi
                r = f.truncate(need)
                env = abs(f.value)
                for i in range(1, N + 1):
                    env = term_scale(H, r) + env
                    r = H.apply_jet(r)
                    r = r + complex(monic[i]) * f.truncate(r.order)
                    env += abs(monic[i]) * abs(f.value)
                rhs = (2.0 ** N) * r.value
                scale = max(term_scale(anti, f), (2.0 ** N) * env, 1e-30)
                worst = max(worst, abs(lhs - rhs) / scale)
        # det(M - xI) reading differs by (-1)^N; report the pairing
        out[side] = worst
        out[f"{side}_sign_flipped"] = (N % 2 == 1)
    out["residual"] = max(out["minus"], out["plus"])
    return out


def check_partner_difference(system: BuiltSystem, grid: SampleGrid,
                             test_functions=None, seed: int = 42) -> float:
    """Residual of H+ - H- against the scalar built from the top
    supercharge coefficient w_{N-1}:
    m^{(N-2)/2} w' + (N-1)/2 m^{(N-4)/2} m' w + N^2 m''/4m^2 - 3N^2 m'^2/8m^3.
    """
    if test_functions is None:
        test_functions = seeded_test_functions(system, seed)
    N = system.N
    m = system.mass.m

    def scalar(q0):
        wj = system.w_top.eval_jet(q0, 1)
        mj = m.eval_jet(q0, 2)
        m0, m1, m2 = mj.value, mj.derivative_value(1), mj.derivative_value(2)
        w0, w1 = wj.value, wj.derivative_value(1)
        return (m0 ** (0.5 * (N - 2)) * w1
                + 0.5 * (N - 1) * m0 ** (0.5 * (N - 4)) * m1 * w0
                + N * N * m2 / (4.0 * m0 * m0)
                - 3.0 * N * N * m1 * m1 / (8.0 * m0 ** 3))

    worst = 0.0
    for psi in test_functions:
        for q in grid.points:
            f = psi.eval_jet(q, 2)
            hp = system.H_plus.apply_jet(f).value
            hm = system.H_minus.apply_jet(f).value
            d = scalar(q) * f.value
            scale = max(abs(hp), abs(hm), abs(d), 1e-30)
            worst = max(worst, abs((hp - hm) - d) / scale)
    return worst


def decay_probe(system: BuiltSystem, sector: str,
                boundary_points) -> dict:
    """|phi|^2 / sqrt(m) at the given points, per sector function.

    Diagnostic only: small values indicate compatibility with the
    symmetric boundary behavior; growth is reported, not failed.
    """
    basis = system.sector_minus if sector in ("minus", "-") \
        else system.sector_plus
    out = {}
    for i, phi in enumerate(basis):
        vals = []
        for q in boundary_points:
            v = phi.eval_jet(q, 0).value
            mv = system.mass.m.eval_jet(q, 0).value
            vals.append(abs(v) ** 2 / abs(mv) ** 0.5)
        out[i] = vals
    return out


def mass_independence(system_a: BuiltSystem, system_b: BuiltSystem,
                      sector: str = "minus") -> float:
    """Max entrywise difference of the sector matrices of two systems
    built from the same gauged data with different mass profiles."""
    ra = extract_matrix(system_a, sector, make_grid(system_a))
    rb = extract_matrix(system_b, sector, make_grid(system_b))
    return float(np.max(np.abs(ra.matrix - rb.matrix)))


def run_all(system: BuiltSystem, grid: SampleGrid | None = None,
            seed: int = 42, tolerances: dict | None = None,
            compare_system: BuiltSystem | None = None) -> dict:
    """All certificates for one system; returns a serializable report.

    Residuals above tolerance are collected under 'failures'. A second
    system (same gauged data, different mass) adds the matrix
    mass-independence check.
    """
    tol = dict(DEFAULT_TOL)
    if tolerances:
        tol.update(tolerances)
    if grid is None:
        grid = make_grid(system)
    fns = seeded_test_functions(system, seed, count=3)
    rep_minus = extract_matrix(system, "minus", grid)
    rep_plus = extract_matrix(system, "plus", grid)
    anti = check_anticommutator(system, grid, fns,
                                reports={"minus": rep_minus,
                                         "plus": rep_plus})
    report = {
        "seed": seed,
        "kernel": check_kernel(system, grid),
        "intertwining": check_intertwining(system, grid, fns),
        "partner_difference": check_partner_difference(system, grid, fns),
        "anticommutator": anti["residual"],
        "anticommutator_sign_flipped": anti["minus_sign_flipped"],
        "spectrum_minus": rep_minus.to_dict(),
        "spectrum_plus": rep_plus.to_dict(),
        "companion_residual": rep_minus.companion_residual(),
    }
    conditions = None
    if hasattr(system, "config"):
        from .typea import verify_type_a_conditions
        conditions = verify_type_a_conditions(system, grid.points)
        for key, val in conditions.items():
            report[key] = val
    if compare_system is not None:
        report["mass_independence"] = mass_independence(
            system, compare_system)
    failures = []
    checks = [("kernel", "kernel"), ("intertwining", "intertwining"),
              ("partner_difference", "partner_difference"),
              ("anticommutator", "anticommutator")]
    for name, key in checks:
        if report[name] > tol[key]:
            failures.append(name)
    if report["spectrum_minus"]["fit_residual"] > tol["matrix_fit"]:
        failures.append("matrix_fit")
    if conditions:
        for key in ("condition_Q", "condition_A"):
            if conditions.get(key) is not None and \
                    conditions[key] > tol["conditions"]:
                failures.append(key)
    if compare_system is not None and \
            report["mass_independence"] > tol["mass_independence"]:
        failures.append("mass_independence")
    report["failures"] = failures
    report["passed"] = not failures
    return report
