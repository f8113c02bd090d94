"""Exception types shared across the package."""


class EmoconnError(Exception):
    """Base class for all emoconn errors."""


class ParameterError(EmoconnError, ValueError):
    """Invalid argument values (bad band edges, shape mismatches, ...)."""


class DataError(EmoconnError, ValueError):
    """Input data violates a precondition (NaN samples, empty class, ...)."""


class NumericalError(EmoconnError, RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""
