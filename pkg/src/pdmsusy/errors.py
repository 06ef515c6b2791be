"""Exception hierarchy shared by all modules."""


class PdmSusyError(Exception):
    """Base class for all library errors."""


class SingularJet(PdmSusyError):
    """A jet primitive was evaluated at (or too close to) its singularity."""


class OrderTooLow(PdmSusyError):
    """A supplied jet does not carry enough Taylor orders for the operation."""


class BadParams(PdmSusyError):
    """Invalid parameters for a named family (mass profile, case, ...)."""


class NonPositiveMass(PdmSusyError):
    """A mass profile flagged as physical is not real and positive."""


class DegenerateBasis(PdmSusyError):
    """Wronskian of a function basis vanishes at an evaluation point."""


class SingularTurningPoint(PdmSusyError):
    """The change-of-variable slope crosses zero inside the window."""


class InvarianceViolated(PdmSusyError):
    """An operator does not preserve the function space it should preserve."""


class IllConditionedBasis(PdmSusyError):
    """Collocation matrix of a sector basis is numerically rank deficient."""


class CaseSingularity(PdmSusyError):
    """The requested window touches a singular point of the case formulas."""


class LatticePole(PdmSusyError):
    """Weierstrass evaluation requested at (or too close to) a lattice point."""


class NotHermitianInput(PdmSusyError):
    """The finite-difference oracle needs real positive mass and real potential."""


class BuildError(PdmSusyError):
    """Internal consistency check failed while assembling a system."""


class SchemaError(PdmSusyError):
    """A run configuration does not match the documented schema."""
