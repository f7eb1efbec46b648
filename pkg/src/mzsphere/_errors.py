class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedDimensionError(ValueError):
    """Operation only implemented for a specific sphere dimension."""


class NumericalError(RuntimeError):
    """An iterative kernel failed to converge."""


class PrecisionError(RuntimeError):
    """A quadrature did not reach the requested accuracy on node doubling."""
