"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`LatticeSommerfeldError`, so callers that sweep over parameters can
catch one type and record a failure marker.
"""


class LatticeSommerfeldError(Exception):
    """Base class for all package errors."""


class ConfigError(LatticeSommerfeldError, ValueError):
    """Invalid or inconsistent problem parameters."""


class NoConvergence(LatticeSommerfeldError):
    """Newton iteration for the lattice wavenumber failed."""


class QuadratureFailure(LatticeSommerfeldError):
    """A quadrature did not reach its tolerance within the node budget."""


class BranchViolation(LatticeSommerfeldError):
    """A square-root branch condition failed (evaluation point on a cut)."""


class BranchFailure(BranchViolation):
    """|lambda| >= 1 at a quadrature node of the reduced Green integral."""


class DegenerateRoot(LatticeSommerfeldError):
    """A kernel zero sits (numerically) on the unit circle."""


class WindowTooSmall(LatticeSommerfeldError):
    """A Green table does not cover the requested index range."""


class TailNotConverged(LatticeSommerfeldError):
    """A truncated lattice sum has a tail bound that does not decay."""


class SingularSystem(LatticeSommerfeldError):
    """The truncated Toeplitz system could not be solved."""


class SolverFailure(LatticeSommerfeldError):
    """The sparse direct solve failed or returned non-finite values."""


class TruncationTooSmall(LatticeSommerfeldError):
    """The scattered field has not decayed at the outer grid boundary."""


class FactorizationInconsistent(LatticeSommerfeldError):
    """Plus/minus factors do not reproduce the continuum symbol."""


class OnCut(LatticeSommerfeldError):
    """A continuum symbol was evaluated on one of its branch cuts."""
