"""Exception hierarchy shared by the library and the CLI."""


class DTWallError(Exception):
    """Base class for all library errors."""


class DomainError(DTWallError, ValueError):
    """An operation was called outside its precondition."""


class IntegralityError(DTWallError, ArithmeticError):
    """A quantity that must be an integer for a genuine CY3 geometry is not.

    The CLI maps this to exit code 2.
    """


class TableError(DTWallError, ValueError):
    """Malformed or inconsistent invariant table."""


class ScaleError(DTWallError, ValueError):
    """An exponent cannot be represented at the requested scale."""


class SamplerExhausted(DTWallError, RuntimeError):
    """The rejection sampler ran out of retries."""
