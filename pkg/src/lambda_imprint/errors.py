"""Exception and warning types shared across the package."""


class LambdaImprintError(Exception):
    """Base class for all package errors."""


class NonFiniteState(LambdaImprintError, FloatingPointError):
    """A density-matrix component became NaN or infinite during integration."""


class WindowTooNarrow(LambdaImprintError, ValueError):
    """The time window cuts a pulse above the truncation threshold."""


class ZeroInput(LambdaImprintError, ValueError):
    """An input envelope has zero integrated intensity."""


class RetrievalFailed(LambdaImprintError):
    """No signal pulse above threshold left the output face."""


class ParseError(LambdaImprintError):
    """Config text could not be parsed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ValidationError(LambdaImprintError, ValueError):
    """A parsed config violates an invariant."""


class GridTooCoarse(UserWarning):
    """Trace drift exceeded the advisory limit; refine dT."""


class OutputError(LambdaImprintError, OSError):
    """Result files could not be written."""
