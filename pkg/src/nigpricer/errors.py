"""Exception types shared across the package."""


class NigError(Exception):
    """Base class for every error raised by this package."""


class AdmissibilityError(NigError, ValueError):
    """Model or market inputs violate a parameter constraint."""


class DomainError(NigError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


class GateViolationError(NigError, RuntimeError):
    """Series convergence condition |k0|/(delta*tau) < 1 does not hold."""

    def __init__(self, ratio: float, message: str | None = None):
        self.ratio = ratio
        super().__init__(message or f"convergence gate violated: |k0|/(delta*tau) = {ratio:.6g} >= 1")


class QuadratureError(NigError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ConfigError(NigError, ValueError):
    """A config file or CLI argument could not be parsed."""
