"""Exception types shared across the package."""


class ClasspolyError(Exception):
    """Base class for errors raised by this package."""


class NonConvergenceError(ClasspolyError):
    """A q-series or q-product hit its term budget before its tail bound."""


class PrecisionExhaustedError(ClasspolyError):
    """All precision escalations were consumed without certifying a result."""


class RoundingFailureError(ClasspolyError):
    """A coefficient was too far from the nearest integer to round safely."""

    def __init__(self, residual, threshold):
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"rounding residual {residual} exceeds threshold {threshold}"
        )


class CrossCheckError(ClasspolyError):
    """Two independent computations of the same quantity disagreed."""


class PowerCheckError(ClasspolyError):
    """A polynomial is not an exact power of its claimed squarefree part."""


class PoleError(ClasspolyError):
    """A function value is too large to be a finite special value."""
