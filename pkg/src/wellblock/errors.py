"""Exception hierarchy shared by all wellblock modules."""

from __future__ import annotations


class WellblockError(Exception):
    """Base class for all package errors."""


class DomainError(WellblockError):
    """A value violates a domain invariant.

    Carries a list of ``(field, constraint)`` pairs so that callers see every
    violated invariant, not just the first one found.
    """

    def __init__(self, violations, message=None):
        if isinstance(violations, tuple):
            violations = [violations]
        self.violations = list(violations)
        if message is None:
            message = "; ".join(f"{f}: {c}" for f, c in self.violations)
        super().__init__(message)


class NoSignChange(WellblockError):
    """No sign change found on the search bracket.

    ``scan`` holds the (x, f(x)) trace of the fallback scan so the failure
    can be reported instead of silently patched.
    """

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan if scan is not None else []


class MaxIterExceeded(WellblockError):
    """Root refinement hit the iteration cap; carries the best bracket."""

    def __init__(self, message, bracket, f_values, iterations):
        super().__init__(message)
        self.bracket = bracket
        self.f_values = f_values
        self.iterations = iterations


class EigenBracketError(NoSignChange):
    """Eigenvalue scan found no sign change up to the configured maximum."""


class RootOutsidePhysicalRange(WellblockError):
    """A solved radius landed outside its admissible physical range."""

    def __init__(self, message, root, valid_range):
        super().__init__(message)
        self.root = root
        self.valid_range = valid_range


class InsufficientSamples(WellblockError):
    """Fewer samples than the check requires."""


class InsufficientPoints(WellblockError):
    """Not enough data points for a regression / limit diagnostic."""


class DivisionByNearZero(WellblockError):
    """A ratio-based check hit a denominator below the safe threshold."""


class StabilityViolation(WellblockError):
    """Explicit time step exceeds the stable step for the grid."""

    def __init__(self, message, tau, tau_max):
        super().__init__(message)
        self.tau = tau
        self.tau_max = tau_max


class NonFiniteDetected(WellblockError):
    """NaN or infinity appeared in a simulated field."""


class SingularSystem(WellblockError):
    """The steady linear system lost its pivot (cannot happen with a
    Dirichlet exterior; asserted defensively)."""


class ConfigError(WellblockError):
    """Malformed or inconsistent run configuration."""
