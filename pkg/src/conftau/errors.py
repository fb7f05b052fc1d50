"""Exception and warning types shared across the package."""


class ConftauError(Exception):
    """Base class for all package errors."""


class GeometryError(ConftauError, ValueError):
    """Inadmissible shape or density (self-intersection, sigma floor, 0 outside)."""


class QuadratureError(ConftauError):
    """A quadrature failed to converge to the requested tolerance."""


class TruncationError(ConftauError):
    """A truncated series lost a non-negligible coefficient."""


class ConvergenceError(ConftauError):
    """An iterative solve did not converge."""


class ConfigError(ConftauError, ValueError):
    """Malformed run configuration."""


class TruncationWarning(UserWarning):
    """The last retained term of a truncated operator series is not small."""


class ConditioningWarning(UserWarning):
    """A Jacobian is badly conditioned."""
