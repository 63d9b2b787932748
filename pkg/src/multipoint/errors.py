"""Exception types raised by the package."""


class ConfigurationError(ValueError):
    """Invalid scatterer configuration or malformed configuration document.

    ``path`` names the offending field (e.g. ``scatterers[2].alpha``) when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class CoincidentScatterersError(ConfigurationError):
    """Two scatterer positions are closer than the separation threshold."""


class SingularityError(ValueError):
    """A field was requested at (or numerically on top of) a scatterer."""


class ResonanceError(ArithmeticError):
    """The contact matrix is numerically singular at the requested energy."""

    def __init__(self, sigma_min, condition):
        self.sigma_min = sigma_min
        self.condition = condition
        super().__init__(
            f"contact matrix is singular: smallest singular value {sigma_min:.6e}, "
            f"condition number {condition:.3e}"
        )


class NotFoundError(RuntimeError):
    """A search did not locate the requested object inside its bracket."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)
