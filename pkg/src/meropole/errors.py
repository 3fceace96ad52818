"""Exception hierarchy.

Every numerical guard raises a distinct subclass of :class:`MeropoleError`
so callers (and the CLI exit-code mapping) can tell guard trips apart from
configuration mistakes and plain check failures.
"""


class MeropoleError(Exception):
    """Base class for all numerical-guard and domain failures."""


class DomainError(MeropoleError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ContourError(MeropoleError):
    """A node evaluation on the contour was non-finite or above the magnitude cap."""


class DeterminantVanishesError(ContourError):
    """The determinant vanished (or underflowed to zero) at a contour node."""


class ResolutionError(MeropoleError):
    """Node-doubling retries were exhausted without resolving the phase."""


class PoleOrderBoundError(MeropoleError):
    """The top requested Laurent coefficient is still above threshold; raise p_max."""


class InsufficientOrderError(MeropoleError):
    """Toeplitz rank increments did not stabilize within the supplied Taylor order."""


class ConsistencyError(MeropoleError):
    """Two routes to the same integer disagreed (tolerance or precondition failure)."""


class ContractViolationError(MeropoleError):
    """An assembled report violates an exact integer contract."""


class ExcludedPointError(DomainError):
    """Configuration at a half-grid point coinciding with declared point spectrum is refused."""


class ConfigError(Exception):
    """Invalid CLI configuration. Deliberately not a MeropoleError: maps to exit code 2."""
