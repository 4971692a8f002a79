"""Exception hierarchy shared by all opx modules.

ValidationError subclasses map to CLI exit code 2, NumericalError
subclasses to exit code 3.
"""


class OpxError(Exception):
    pass


class ValidationError(OpxError, ValueError):
    """Bad input: unknown catalog id, parameter out of range, point
    outside an operation's domain."""


class CatalogError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class RegimeError(DomainError):
    """Point lies outside the asymptotic regime an evaluator covers."""


class BranchError(DomainError):
    """Boundary value on a branch cut requested without choosing a side."""


class NumericalError(OpxError, RuntimeError):
    """Computation started but did not reach the requested accuracy."""


class SolverError(NumericalError):
    pass


class ResolutionError(NumericalError):
    """Quadrature/grid refinement failed to stabilize the result."""


class GrowthError(ValidationError):
    """Weight decays too slowly for the requested truncation."""
