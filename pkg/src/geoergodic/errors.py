"""Exception types shared across the package."""


class GeoErgodicError(Exception):
    """Base class for all package errors."""


class DomainError(GeoErgodicError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(GeoErgodicError, ValueError):
    """Coordinates or parameters fail a structural check."""


class CapabilityError(GeoErgodicError, NotImplementedError):
    """The operation is not supported for the given space kind."""


class PreconditionError(GeoErgodicError, ValueError):
    """A hypothesis of the construction does not hold."""


class InconclusiveError(GeoErgodicError, RuntimeError):
    """A sampled estimator found no admissible configuration."""
