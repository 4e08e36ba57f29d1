"""Exception hierarchy."""


class UUMCError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(UUMCError, ValueError):
    """An argument is outside its valid domain."""


class StructuralError(UUMCError, ValueError):
    """A graph or weight tensor violates the acyclic/topological-order contract."""


class DegenerateDrawError(UUMCError):
    """A measure-zero degenerate draw occurred twice in a row."""


class UnstableError(UUMCError):
    """A VAR process is not stable (companion spectral radius >= 1)."""

    def __init__(self, message: str, spectral_radius: float):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class GenerationError(UUMCError):
    """Model generation failed after the allowed number of retries."""

    def __init__(self, message: str, spectral_radius: float | None = None):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class DegenerateDataError(UUMCError, ValueError):
    """A data column has zero variance where a positive one is required."""

    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


class QueryError(UUMCError, KeyError):
    """A requested edge or entry does not exist in the model."""
