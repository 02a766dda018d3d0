"""Exception types shared across the package."""


class CoamoebaError(Exception):
    """Base class for errors raised by this package."""


class ParseError(CoamoebaError, ValueError):
    """Malformed polynomial, complex literal or root list.

    ``offset`` is the UTF-8 byte offset at which the problem was detected.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class UnknownVariableError(ParseError):
    pass


class RootFindingError(CoamoebaError, ArithmeticError):
    """The univariate solver did not reach its residual bound."""


class UnsupportedRankError(CoamoebaError, ValueError):
    pass
