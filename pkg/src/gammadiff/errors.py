"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a function or distribution."""


class PoleError(DomainError):
    """Evaluation lands on a pole (infinite value)."""


class ConvergenceError(RuntimeError):
    """An iterative procedure failed to reach its tolerance."""


class QuadratureError(RuntimeError):
    """Integrand produced a non-finite value at a quadrature node."""

    def __init__(self, abscissa: float, value: float):
        self.abscissa = abscissa
        self.value = value
        super().__init__(f"integrand is non-finite ({value!r}) at x = {abscissa!r}")
