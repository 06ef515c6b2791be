"""Acceptance suite: one test per criterion, at the stated tolerances.

The shared sweep covers all five cases, N in 1..4, and two mass profiles
(constant and exponential), with Q coefficients drawn from seed 42. The
conftest hook prints one PASS/FAIL line per criterion after the run.
"""

import json

import numpy as np
import pytest

from pdmsusy import cli
from pdmsusy import oracle as oc
from pdmsusy import scalarfn as sf
from pdmsusy import typea as ta
from pdmsusy import verify as vf

SWEEP_CASES = ta.CASES
SWEEP_N = (1, 2, 3, 4)
SWEEP_MASSES = ("constant", "exp_scale")


def _mass(name):
    if name == "constant":
        return sf.builtin_mass_profile("constant")
    if name == "exp_scale":
        return sf.builtin_mass_profile("exp_scale", alpha=1.0)
    return sf.builtin_mass_profile("cauchy_sq")


def _config(case, N, mass_idx, case_idx):
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=42, spawn_key=(case_idx, N, mass_idx)))
    b = tuple(rng.uniform(-0.8, 0.8, 3) + 1j * rng.uniform(-0.3, 0.3, 3))
    kwargs = {}
    if case in ("III", "IV"):
        kwargs["nu"] = 1.0
    if case == "V":
        kwargs["g2"], kwargs["g3"] = 4.0, 1.0
    return ta.TypeAConfig(N=N, b=b, R=0.2, case=case, **kwargs)


@pytest.fixture(scope="session")
def sweep():
    systems = {}
    for ci, case in enumerate(SWEEP_CASES):
        for N in SWEEP_N:
            for mi, mass_name in enumerate(SWEEP_MASSES):
                cfg = _config(case, N, mi, ci)
                s = ta.build_type_a(cfg, _mass(mass_name))
                grid = vf.SampleGrid(tuple(s.grid(5)))
                fns = vf.seeded_test_functions(s, seed=42, count=2)
                systems[(case, N, mass_name)] = (s, grid, fns)
    return systems


@pytest.fixture(scope="session")
def harmonic_pair():
    cfg = ta.TypeAConfig(N=2, b=(0, -2, 0), R=0, case="I")
    const = ta.build_type_a(cfg, _mass("constant"), u_window=(0.35, 1.45))
    exp = ta.build_type_a(cfg, _mass("exp_scale"), u_window=(0.35, 1.45))
    return const, exp


def test_criterion_01_intertwining(sweep):
    worst = max(vf.check_intertwining(s, grid, fns)
                for s, grid, fns in sweep.values())
    assert worst <= 1e-8, f"max intertwining residual {worst:.3e}"


def test_criterion_02_kernel(sweep):
    worst = max(vf.check_kernel(s, grid) for s, grid, _ in sweep.values())
    assert worst <= 1e-9, f"max kernel residual {worst:.3e}"


def test_criterion_03_spectrum_reproduction(harmonic_pair):
    const, _ = harmonic_pair
    rep = vf.extract_matrix(const, "minus", vf.make_grid(const))
    assert rep.fit_residual <= 1e-8
    assert abs(rep.eigenvalues[0] - (-1.0)) < 1e-10
    assert abs(rep.eigenvalues[1] - 1.0) < 1e-10
    fd = oc.solve_fd(oc.FDProblem(m=const.mass, U=const.U_minus,
                                  qa=-8.0, qb=8.0, grid_size=4000), 2)
    assert abs(fd.eigenvalues[0] - (-1.0)) <= 1e-4
    assert abs(fd.eigenvalues[1] - 1.0) <= 1e-4


def test_criterion_04_mass_independence(harmonic_pair):
    const, exp = harmonic_pair
    delta = vf.mass_independence(const, exp)
    assert delta <= 1e-7, f"matrix entries drifted by {delta:.3e}"
    fd = oc.solve_fd(oc.FDProblem(m=exp.mass, U=exp.U_minus,
                                  qa=-12.0, qb=3.0, grid_size=4000), 4)
    spectrum = np.asarray(fd.eigenvalues)
    for want in (-1.0, 1.0):
        dist = float(np.min(np.abs(spectrum - want)))
        assert dist <= 1e-3, (
            f"algebraic eigenvalue {want} not in the Dirichlet spectrum "
            f"{np.round(spectrum, 6)} (closest at distance {dist:.3e}); "
            "the ground-state sector function does not vanish toward the "
            "left boundary, so the Dirichlet problem cannot contain it")


def test_criterion_05_anticommutator(sweep):
    worst = 0.0
    for case in ("I", "II", "III"):
        for N in (1, 2, 3):
            for mass_name in SWEEP_MASSES:
                s, _, _ = sweep[(case, N, mass_name)]
                grid = vf.make_grid(s)  # matrix extraction needs 2N+1 points
                fns = vf.seeded_test_functions(s, seed=42, count=3)
                res = vf.check_anticommutator(s, grid, fns)
                worst = max(worst, res["residual"])
    assert worst <= 1e-6, f"max anti-commutator residual {worst:.3e}"


def test_criterion_06_partner_difference(sweep):
    worst = max(vf.check_partner_difference(s, grid, fns)
                for s, grid, fns in sweep.values())
    assert worst <= 1e-8, f"max partner-difference residual {worst:.3e}"


def test_criterion_07_structural_conditions(sweep):
    worst = 0.0
    for (case, N, mass_name), (s, grid, _) in sweep.items():
        rep = ta.verify_type_a_conditions(s, grid.points)
        for val in rep.values():
            if val is not None:
                worst = max(worst, val)
    assert worst <= 1e-8, f"max condition residual {worst:.3e}"
    # negative control: corrupted W must be detected
    s, grid, _ = sweep[("I", 2, "constant")]
    rep = ta.verify_type_a_conditions(s, grid.points,
                                      corrupt_w=sf.var() ** 3)
    assert rep["condition_Q"] > 1e-2


def test_criterion_08_constant_mass_lift(sweep):
    const_mass = _mass("constant")
    for mass_name in ("exp_scale", "cauchy_sq"):
        mass = _mass(mass_name)
        for ci, case in enumerate(("I", "II", "III", "IV")):
            cfg = _config(case, 2, 0, ci)
            s = ta.build_type_a(cfg, mass)
            for q in s.grid(7):
                u = mass.u.eval_jet(q, 0).value
                mj = mass.m.eval_jet(q, 2)
                m0 = mj.value
                m1 = mj.derivative_value(1)
                m2 = mj.derivative_value(2)
                corr = m2 / (8 * m0 ** 2) - 7 * m1 ** 2 / (32 * m0 ** 3)
                for sig in (-1, 1):
                    lifted = ta.case_potential(cfg, mass, sig, q)
                    base = ta.case_potential(cfg, const_mass, sig, u)
                    err = abs(lifted - base - corr)
                    assert err <= 1e-9 * (1 + abs(lifted))


def test_criterion_09_elliptic_case(sweep):
    rng = np.random.default_rng(9)
    for g2, g3 in ((4.0, 0.0), (4.0, 1.0)):
        roots = ta.weierstrass_e_roots(g2, g3)
        assert abs(sum(roots)) <= 1e-12
        for _ in range(50):
            u = complex(rng.uniform(0.25, 1.0), rng.uniform(-0.15, 0.15))
            p, dp = ta.weierstrass_p(u, g2, g3)
            res = dp * dp - (4 * p ** 3 - g2 * p - g3)
            assert abs(res) <= 1e-9 * (1 + abs(p)) ** 3
    cfg = ta.TypeAConfig(N=2, b=(0, 0, 0.7), R=0.1, case="V",
                         g2=4.0, g3=0.0)
    mass = _mass("constant")
    s = ta.build_type_a(cfg, mass)
    g = ta.builder_system(cfg, mass, window=s.window)
    qa, qb = s.window
    for q in np.linspace(qa.real + 0.03, qb.real - 0.03, 10):
        q = complex(q)
        for sig, U in ((-1, g.U_minus), (1, g.U_plus)):
            closed = ta.case_potential(cfg, mass, sig, q)
            built = U.eval_jet(q, 0).value
            assert abs(closed - built) <= 1e-6 * (1 + abs(built))


def test_criterion_10_first_order_reduction():
    mass = _mass("constant")
    z = sf.var()
    psi = (1 + 0.5 * z) * sf.exp(-0.5 * (z - 0.9) ** 2)
    for c in (1.0, 1.0 + 1.0j):
        cfg = ta.TypeAConfig(N=1, b=(0, 0, c), R=0.3, case="I")
        s = ta.build_type_a(cfg, mass)
        for q in s.grid(7):
            f = psi.eval_jet(q, 6)
            lhs = s.P_N_t.apply_jet(s.P_N.apply_jet(f)).value
            rhs = 2.0 * (s.H_minus.apply_jet(f.truncate(4)).value
                         + cfg.R * f.value)
            assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_criterion_11_deterministic_reports(tmp_path):
    cfg = {
        "schema": 1,
        "seed": 42,
        "system": {"type": "typeA", "case": "I", "N": 2,
                   "b": [0, -2, 0], "R": 0},
        "mass": {"profile": "constant"},
        "window": {"qmin": 0.3, "qmax": 1.5, "samples": 9},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    assert cli.main(["verify", "--config", str(path),
                     "--out", str(out_a)]) == 0
    assert cli.main(["verify", "--config", str(path),
                     "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
