"""Exception types shared across the package."""


class FourlatError(Exception):
    pass


class ParameterError(FourlatError, ValueError):
    """Invalid numerical parameter (mesh, class exponents, split exponent...)."""


class DomainError(FourlatError, ValueError):
    """Input outside the domain of a map (non-finite point, empty set)."""


class SpectralParameterError(FourlatError, ValueError):
    """Spectral parameter z lies in (or too close to) the spectrum."""


class ShapeError(FourlatError, ValueError):
    pass


class ConfigError(FourlatError, ValueError):
    """Inconsistent experiment or grid configuration."""


class AliasingError(ConfigError):
    """Proxy refinement or period too coarse to resolve the required frequencies."""


class DegenerateDataError(FourlatError, ValueError):
    pass


class IllConditionedWindowError(FourlatError, ValueError):
    pass


class SolverError(FourlatError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExperimentError(FourlatError):
    """A module error raised during an experiment, tagged with (h, stage)."""

    def __init__(self, message, h=None, stage=None):
        super().__init__(f"[h={h}, stage={stage}] {message}")
        self.h = h
        self.stage = stage


class NumericError(FourlatError, RuntimeError):
    """An eigensolver or factorization failed."""
