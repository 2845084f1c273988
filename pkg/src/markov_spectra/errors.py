"""Exception types shared across the package."""


class SpectraError(Exception):
    """Base class for all package errors."""


class InputError(SpectraError, ValueError):
    """Bad arguments or violated preconditions (CLI exit code 2)."""


class EmptyResultError(SpectraError):
    """A computation produced an empty object, e.g. an empty graph core (exit code 3)."""


class NotMixingError(InputError):
    """Raised when a mixing component is required but the component is not mixing."""
