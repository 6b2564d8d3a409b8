"""Exception hierarchy shared by all pgrepair modules."""


class PgRepairError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(PgRepairError):
    """Malformed graph input: duplicate ids, dangling endpoints, bad values."""


class ParseError(PgRepairError):
    """Syntax error in a constraint file, with position information."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(PgRepairError):
    """Structurally valid parse that violates a well-formedness rule."""


class ResourceCapExceeded(PgRepairError):
    """A configured match/path/run limit was hit; no partial result is returned."""


class SolverTimeout(PgRepairError):
    """The branch-and-bound node budget was exhausted before proving optimality."""


class WeightError(PgRepairError):
    """Missing or non-positive custom weight on a graph object."""


class ConfigError(PgRepairError):
    """Conflicting or out-of-range pipeline options."""
