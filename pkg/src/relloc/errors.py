"""Exception types raised by the simulator."""


class RellocError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(RellocError, ValueError):
    """Grid size or half-width out of range."""


class InvalidParameterError(RellocError, ValueError):
    """A physical or numerical parameter is out of range."""


class InvalidGridError(RellocError, ValueError):
    """Momentum grid is not uniform or not symmetric."""


class DegenerateCollapseError(RellocError, ArithmeticError):
    """The post-event state has (numerically) zero norm."""


class EmptyHalfError(RellocError, ValueError):
    """The requested half-space carries no probability mass."""


class ZeroLikelihoodError(RellocError, ArithmeticError):
    """Both hypotheses assign zero density to an observed momentum."""
