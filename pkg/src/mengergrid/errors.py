"""Exception types shared across the package."""


class MengerGridError(Exception):
    """Base class for all package errors."""


class DomainError(MengerGridError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(MengerGridError, ValueError):
    """A structure (grid, file, config) failed validation."""


class CapacityError(MengerGridError, RuntimeError):
    """A size budget was exceeded, or a heuristic search ran out of room."""
