"""Independent finite-difference eigenvalue oracle.

The variable-mass Schroedinger operator rewrites in flux (self-adjoint)
form H = -d/dq (1/(2m) d/dq) + U, which discretizes on a uniform grid as a
symmetric tridiagonal matrix with staggered mass samples:

    off-diagonal  -1/(2 m_{i+1/2} h^2)
    diagonal      (1/(2 m_{i-1/2}) + 1/(2 m_{i+1/2}))/h^2 + U_i

Dirichlet boundaries; lowest eigenvalues by bisection on the tridiagonal
matrix. This path shares nothing with the jet/operator machinery, so
agreement between the algebraic sector spectra and these eigenvalues is an
independent certificate. Grid doubling gives a Richardson consistency
check (second-order scheme: differences shrink ~4x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .builder import BuiltSystem
from .errors import NotHermitianInput
from .scalarfn import MassProfile

_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class FDProblem:
    """Real, Hermitian eigenproblem on an interval with Dirichlet ends."""

    m: MassProfile
    U: object  # callable q -> value, or anything with eval_jet
    qa: float
    qb: float
    grid_size: int = 2000

    def __post_init__(self):
        if self.grid_size < 200:
            raise ValueError("grid_size must be at least 200")
        if not self.qb > self.qa:
            raise ValueError("need qb > qa")


def _real(val, what: str, where: float) -> float:
    val = complex(val)
    if abs(val.imag) > _IMAG_TOL * (1.0 + abs(val)):
        raise NotHermitianInput(f"{what}({where}) = {val} is not real")
    return val.real


def _u_value(U, q: float) -> complex:
    if hasattr(U, "eval_jet"):
        return U.eval_jet(q, 0).value
    return U(q)


def _eigs(problem: FDProblem, k: int, n: int):
    h = (problem.qb - problem.qa) / n
    interior = problem.qa + h * np.arange(1, n)
    half = problem.qa + h * (np.arange(n) + 0.5)
    minv = np.empty(n)
    for i, q in enumerate(half):
        mv = _real(problem.m.m.eval_jet(complex(q), 0).value, "m", q)
        if mv <= 0.0:
            raise NotHermitianInput(f"m({q}) = {mv} is not positive")
        minv[i] = 0.5 / mv
    diag = (minv[:-1] + minv[1:]) / h ** 2
    off = -minv[1:-1] / h ** 2
    for i, q in enumerate(interior):
        diag[i] += _real(_u_value(problem.U, complex(q)), "U", q)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, k - 1),
                            lapack_driver="stebz", tol=1e-14)
    return np.asarray(vals)


@dataclass
class FDReport:
    eigenvalues: list
    eigenvalues_fine: list
    richardson: list
    grid_size: int
    h: float

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "eigenvalues_fine": [float(x) for x in self.eigenvalues_fine],
            "richardson": [float(x) for x in self.richardson],
            "grid_size": self.grid_size,
            "h": float(self.h),
        }


def solve_fd(problem: FDProblem, k: int = 4) -> FDReport:
    """Lowest k eigenvalues at the requested grid and at double resolution."""
    if k >= problem.grid_size // 4:
        raise ValueError("k must be much smaller than grid_size")
    coarse = _eigs(problem, k, problem.grid_size)
    fine = _eigs(problem, k, 2 * problem.grid_size)
    return FDReport(
        eigenvalues=list(coarse),
        eigenvalues_fine=list(fine),
        richardson=list(np.abs(coarse - fine)),
        grid_size=problem.grid_size,
        h=(problem.qb - problem.qa) / problem.grid_size,
    )


def auto_window(system: BuiltSystem, floor: float = 1e-10,
                max_widenings: int = 6) -> tuple:
    """Widen the system window until every minus-sector function is below
    `floor` in magnitude at both edges (or the cap is reached).

    Widening stops early if a sector function cannot be evaluated at the
    attempted edge (singularity floor of the jet primitives)."""
    from .errors import SingularJet

    qa, qb = system.window
    qa, qb = float(complex(qa).real), float(complex(qb).real)
    best = (qa, qb)
    for _ in range(max_widenings):
        try:
            edge = 0.0
            for phi in system.sector_minus:
                for q in (qa, qb):
                    edge = max(edge, abs(phi.eval_jet(q, 0).value))
        except SingularJet:
            return best
        best = (qa, qb)
        if edge < floor:
            break
        span = qb - qa
        qa -= 0.5 * span
        qb += 0.5 * span
    return best


def oracle_compare(system: BuiltSystem, algebraic: list,
                   interval: tuple | None = None, grid_size: int = 2000,
                   k: int | None = None, tol: float = 1e-3,
                   decay_floor: float = 1e-8) -> dict:
    """Match algebraic sector eigenvalues against the FD spectrum.

    Each algebraic eigenvalue is annotated with whether its sector decay
    probe passes at the interval edges; only decaying states are expected
    in the Dirichlet spectrum.
    """
    if interval is None:
        interval = auto_window(system)
    qa, qb = interval
    if k is None:
        k = max(4, len(algebraic) + 2)
    problem = FDProblem(m=system.mass, U=system.U_minus, qa=qa, qb=qb,
                        grid_size=grid_size)
    rep = solve_fd(problem, k)
    from .verify import decay_probe
    probes = decay_probe(system, "minus", [qa, qb])
    matches = []
    for i, e in enumerate(algebraic):
        e = complex(e)
        decays = max(probes[i]) < decay_floor if i in probes else None
        if abs(e.imag) > 1e-8 * (1 + abs(e)):
            matches.append({"eigenvalue": [e.real, e.imag], "matched": False,
                            "decays": decays, "note": "complex"})
            continue
        dist = float(np.min(np.abs(np.array(rep.eigenvalues_fine) - e.real)))
        matches.append({"eigenvalue": [e.real, e.imag],
                        "matched": bool(dist <= tol),
                        "distance": dist, "decays": decays})
    return {"fd": rep.to_dict(), "interval": [qa, qb], "matches": matches}
