"""Exception hierarchy shared by every module."""


class GeomRegError(Exception):
    """Base class for all package errors."""


class ValidationError(GeomRegError, ValueError):
    """Inputs are malformed or violate a documented precondition."""


class ParseError(ValidationError):
    """A file could not be parsed. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NumericalError(GeomRegError, ArithmeticError):
    """A computation left its valid numerical domain."""


class DomainError(NumericalError):
    """Argument lies outside the domain of a geometric map (e.g. past the cut locus)."""


class ContractError(GeomRegError, AssertionError):
    """A structural invariant (tangency, base point) was violated by the caller."""


class ConvergenceError(NumericalError):
    """An iteration failed to converge; the last iterate is kept on ``last``."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last
