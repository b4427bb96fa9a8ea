"""Exception and warning types raised across the package."""


class JmesError(Exception):
    """Base class for all package errors."""


class DomainError(JmesError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonintegrableTail(JmesError, ArithmeticError):
    """The upper tail mean needed by the measure diverges."""


class ZeroQuantile(JmesError, ZeroDivisionError):
    """EPW is undefined because the quantile is zero."""


class ZeroDenominator(JmesError, ZeroDivisionError):
    """A ratio measure has a zero (or numerically zero) baseline."""


class DegenerateConditioning(JmesError, ArithmeticError):
    """The conditioning event {U > alpha, V > beta} has (near) zero mass."""


class NonConvergence(JmesError, RuntimeError):
    """An optimizer or root finder did not converge.

    The best iterate found is kept on ``best`` when available.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DensityUnavailable(JmesError, NotImplementedError):
    """The model has no (continuous) density."""


class InsufficientTailSamples(JmesError, ValueError):
    """Too few Monte Carlo samples survive the conditioning event."""


class DegenerateSample(JmesError, ValueError):
    """A sample is constant or otherwise unusable for fitting."""


class NonPositivePrice(JmesError, ValueError):
    """A price series contains a zero or negative price."""


class UnknownFigure(JmesError, KeyError):
    """Requested figure id is not in the supported set."""


class NumericalDifferentiationWarning(UserWarning):
    """A conditional derivative fell back to central differences."""


class QuadratureWarning(UserWarning):
    """Adaptive quadrature reported a possible accuracy problem."""
