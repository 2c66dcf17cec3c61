"""Exception hierarchy shared by every module."""


class SOCError(Exception):
    """Base class for all package errors."""


class NonSquare(SOCError):
    pass


class ConvergenceFailure(SOCError):
    pass


class SpectralPoint(SOCError):
    """Raised when a resolvent is requested at (or numerically at) an eigenvalue."""


class DomainViolation(SOCError):
    pass


class DimensionMismatch(SOCError):
    pass


class EmptyGraph(SOCError):
    pass


class UnregisteredFunctor(SOCError):
    pass


class NonRealData(SOCError):
    """Complexification was asked to transport data that is not certified real."""


class MissingDistinguished(SOCError):
    pass


class ValidationFailure(SOCError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IndexMismatch(SOCError):
    pass


class UnsupportedLevel(SOCError):
    pass


class InconsistentDecomposition(SOCError):
    pass


class ParseError(SOCError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column
