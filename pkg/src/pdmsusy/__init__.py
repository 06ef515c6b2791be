"""Quantum systems with position-dependent mass: partner Hamiltonians,
N-fold supercharges, solvable sectors, and numeric certificates."""

from ._backend import backend_name
from .builder import (Anchors, BuiltSystem, GaugedData, build,
                      pdm_hamiltonian, solve_change_of_variable)
from .diffop import (LinearDiffOp, annihilator_from_basis, apply, compose,
                     transpose)
from .jets import Jet, jet_arith, jet_const, jet_func, jet_variable
from .oracle import FDProblem, oracle_compare, solve_fd
from .scalarfn import (MassProfile, ScalarFunction, builtin_mass_profile,
                       eval_jet, von_roos_effective_potential)
from .typea import (TypeAConfig, TypeASystem, build_type_a, case_potential,
                    case_sector, verify_type_a_conditions, weierstrass_p)
from .verify import (SampleGrid, check_anticommutator, check_intertwining,
                     check_kernel, check_partner_difference, decay_probe,
                     extract_matrix, make_grid)

__version__ = "0.1.0"

__all__ = [
    "Anchors", "BuiltSystem", "FDProblem", "GaugedData", "Jet",
    "LinearDiffOp", "MassProfile", "SampleGrid", "ScalarFunction",
    "TypeAConfig", "TypeASystem", "annihilator_from_basis", "apply",
    "backend_name", "build", "build_type_a", "builtin_mass_profile",
    "case_potential", "case_sector", "check_anticommutator",
    "check_intertwining", "check_kernel", "check_partner_difference",
    "compose", "decay_probe", "eval_jet", "extract_matrix", "jet_arith",
    "jet_const", "jet_func", "jet_variable", "make_grid", "oracle_compare",
    "pdm_hamiltonian", "solve_change_of_variable", "solve_fd", "transpose",
    "verify_type_a_conditions", "von_roos_effective_potential",
    "weierstrass_p", "__version__",
]
