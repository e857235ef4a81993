"""Exception hierarchy shared by the solver modules."""


class RoughCylError(Exception):
    """Base class for all package errors."""


class DomainError(RoughCylError, ValueError):
    """Argument outside the domain of a special function or formula."""


class GeometryError(RoughCylError, ValueError):
    """Invalid or degenerate surface geometry."""


class SingularMatrixError(RoughCylError, ArithmeticError):
    """LU factorization hit a pivot below the singularity threshold."""

    def __init__(self, message, pivot=None, threshold=None):
        super().__init__(message)
        self.pivot = pivot
        self.threshold = threshold


class QuadratureError(RoughCylError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions before meeting tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(RoughCylError, ValueError):
    """Run configuration failed validation; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
