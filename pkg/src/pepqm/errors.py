"""Exception types shared across the package.

The command line front end maps these onto distinct exit codes, so library
code should raise the most specific class that applies.
"""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ContractViolationError(ValueError):
    """An input breaks a declared structural constraint: wrong sign branch,
    mismatched grids, missing spacing, and the like."""


class ResolutionError(RuntimeError):
    """A grid is too coarse to resolve the requested computation; the result
    would be silently wrong rather than slightly inaccurate."""


class GridLeakageError(ResolutionError):
    """A wave packet has reached the edge of its spatial grid."""


class NoTunnelingError(DomainError):
    """The energy is at or above the barrier top: no forbidden region."""


class AmbiguousBarrierError(DomainError):
    """More than one classically forbidden interval inside the bracket."""
