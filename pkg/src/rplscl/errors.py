"""Exception types raised by the numerical routines."""


class RplError(Exception):
    """Base class for all package errors."""


class NoRealRootError(RplError, ValueError):
    """Requested angular momentum lies outside the energy surface."""


class NumericError(RplError, RuntimeError):
    """A root search or quadrature did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual


class OrbitNotFoundError(RplError, ValueError):
    """The periodic orbit does not exist at this power parameter."""


class ResolutionError(RplError, RuntimeError):
    """Grid, box or sampling resolution is insufficient."""


class CompletenessError(RplError, ValueError):
    """A spectrum does not cover the required energy window."""


class DivergenceError(RplError, ArithmeticError):
    """An asymptotic formula is singular at the requested point."""


class AccuracyError(RplError, ValueError):
    """Argument lies outside the range where the accuracy target holds."""
