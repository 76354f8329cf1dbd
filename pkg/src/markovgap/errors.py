"""Exception hierarchy shared by every module."""


class MarkovGapError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(MarkovGapError):
    """A requested dimension exceeds the dense-memory guard."""


class DomainError(MarkovGapError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ConstructionError(MarkovGapError, ValueError):
    """A state specification cannot be assembled (overlaps, bad dims)."""


class NumericError(MarkovGapError, ArithmeticError):
    """A linear-algebra kernel failed to converge."""


class ConsistencyError(MarkovGapError, RuntimeError):
    """An internal identity that must hold exactly was violated."""


class ConfigError(MarkovGapError, ValueError):
    """An experiment configuration is malformed."""
