"""
Exception types shared by the spectral checker.
Every error raised by the core modules derives from SpectralError so that
suites can record a failing case and carry on.
"""


class SpectralError(Exception):
    """Base class for all checker errors."""


class UnsupportedTypeError(SpectralError):
    """Requested root system type or lattice is not available."""


class ConsistencyError(SpectralError):
    """An internal identity that must hold exactly was violated."""


class PoleCollisionError(SpectralError):
    """An integrand or factor was evaluated on (or too close to) a pole."""


class DivergenceError(SpectralError):
    """A limit or an improper integral does not exist numerically."""


class InadmissibleContourError(SpectralError):
    """Contour shift violates |ς^α| > |q| for some positive root."""

    def __init__(self, violated):
        self.violated = list(violated)
        super().__init__(f"Contour shift inadmissible for positive roots: {self.violated}")


class ConfigError(SpectralError):
    """Malformed configuration; carries the dotted path of the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
