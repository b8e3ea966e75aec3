"""Exception hierarchy shared by every module."""


class FourSqError(Exception):
    """Base class for all errors raised by foursq."""


class DomainError(FourSqError, ValueError):
    """An argument lies outside the range where the operation is defined."""


class ArityMismatch(FourSqError, ValueError):
    pass


class DivisibilityError(FourSqError, ValueError):
    pass


class ResourceLimit(FourSqError):
    """The request exceeds a fixed desk-scale resource cap."""


class NotFound(FourSqError):
    """A bounded search found no witness.

    ``diagnostics`` is a list of dicts describing every candidate that was
    tried and why it was rejected.
    """

    def __init__(self, message, diagnostics=None, reason="not_found"):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])
        self.reason = reason


class NoAdmissibleCandidate(NotFound):
    """No integer in the search interval satisfies the side conditions."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message, diagnostics, reason="no_admissible_candidate")


class SearchExhausted(NotFound):
    def __init__(self, message, diagnostics=None):
        super().__init__(message, diagnostics, reason="search_exhausted")


class InternalInvariantViolation(FourSqError, AssertionError):
    """A result failed post-validation where existence is unconditional."""


class ConfigError(FourSqError, ValueError):
    pass


class LogIntegrityError(FourSqError):
    """A persisted witness log failed verification on load."""
