"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """An internal numerical invariant broke (norms, convergence, residuals)."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds the configured memory/size budget."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""
