"""Exception hierarchy shared by every septensor module."""


class SeptensorError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGrid(SeptensorError, ValueError):
    pass


class DomainError(SeptensorError, ValueError):
    """A point lies outside the domain, or a sample evaluated to NaN."""


class UnsupportedOffGrid(SeptensorError, ValueError):
    """A tabulated source was queried away from its nodes."""


class ZeroFunction(SeptensorError, ArithmeticError):
    """The greedy loop found no nonzero pivot to start from."""


class InvalidRank(SeptensorError, ValueError):
    pass


class NumericError(SeptensorError, ArithmeticError):
    pass


class ConfigError(SeptensorError, ValueError):
    """Malformed user input: CSV files, JSON configs, CLI flags."""


class ExprSyntaxError(SeptensorError, ValueError):
    """Parse failure, carrying the 0-based character offset of the culprit."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
