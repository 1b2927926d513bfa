"""Error taxonomy shared across the engine.

DataError covers anything wrong with user-supplied data or parameters;
InternalError covers contract violations inside the engine. The CLI maps
them to distinct exit codes.
"""


class DataError(ValueError):
    """Bad input data or invalid parameter values."""


class InternalError(RuntimeError):
    """Engine invariant broken; indicates a bug, not bad input."""


class MatrixBudgetExceeded(MemoryError):
    """A distance matrix would not fit the configured memory budget."""
