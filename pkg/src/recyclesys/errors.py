"""Exception types shared across the package."""


class RecyclesysError(Exception):
    """Base class for package errors."""


class DomainError(RecyclesysError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnknownNameError(RecyclesysError, KeyError):
    """Lookup of a technology, commodity, material or constraint failed."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigurationError(RecyclesysError):
    """Inconsistent model inputs, scenario files or datasets."""


class SolverError(RecyclesysError):
    """The simplex kernel failed numerically (distinct from infeasibility)."""


class SolverStateError(RecyclesysError):
    """A solution was queried for duals without being optimal."""


class PathwayError(RecyclesysError):
    """A pathway step could not be solved to optimality."""

    def __init__(self, message, year=None, status=None, rows=()):
        super().__init__(message)
        self.year = year
        self.status = status
        self.rows = tuple(rows)


class ComparisonError(RecyclesysError):
    """Scenario results cannot be compared."""
