"""Exception hierarchy.

Everything raised on purpose by the library derives from ``FinsleroidError``
so callers (and the CLI) can map failures to exit codes with one ``except``.
"""


class FinsleroidError(ValueError):
    """Base class for library errors."""


class DomainError(FinsleroidError):
    """Input lies outside the region where an operation is defined."""


class SectorError(DomainError):
    """Vector belongs to the wrong sector of the cone decomposition."""


class SingularityError(DomainError):
    """Input sits on a locus where a closed form is singular (isotropic cone, axis)."""


class PreconditionError(DomainError):
    """A stated precondition (e.g. unit initial velocity) is violated."""


class DegenerateCurveError(DomainError):
    """Geodesic endpoints coincide or the chord is null."""


class AccuracyError(FinsleroidError, ArithmeticError):
    """A finite-difference stencil cannot be placed with a usable step."""
