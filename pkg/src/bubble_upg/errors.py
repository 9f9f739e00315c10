"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain where the function is defined."""


class ParameterError(ValueError):
    """A discretization parameter violates its admissibility condition."""


class SizeError(ValueError):
    pass


class QuadratureError(RuntimeError):
    """Composite quadrature did not reach the requested accuracy."""

    def __init__(self, message, estimate):
        super().__init__(f"{message} (estimated relative error {estimate:.3e})")
        self.estimate = estimate


class ZeroPivotError(ArithmeticError):
    """Pivotless elimination hit a zero or denormal pivot."""


class SingularMatrixError(ArithmeticError):
    pass


class BoundUnavailableError(ValueError):
    """The a priori bound needs f' and none was supplied."""
