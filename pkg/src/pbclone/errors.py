"""Exception types shared across the package."""


class CloneError(Exception):
    """Base class for all errors raised by pbclone."""


class ArityError(CloneError, ValueError):
    """A table, scope or position does not match the expected arity."""


class CapacityError(CloneError):
    """A table or intermediate factor would exceed the configured arity cap."""


class NotPermissiveError(CloneError, ValueError):
    """An operation defined only for strictly positive functions got a zero entry."""


class PreconditionError(CloneError, ValueError):
    """A named precondition of a construction does not hold."""


class FormulaError(CloneError, ValueError):
    """A pps-formula is malformed or inconsistent with its environment."""


class ParseError(CloneError):
    """Syntax error in a function file or formula DSL source."""

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message
