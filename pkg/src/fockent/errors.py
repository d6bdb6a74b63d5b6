"""Exception types shared across the package."""


class FockentError(Exception):
    """Base class for all package-specific errors."""


class DuplicateModeError(FockentError, ValueError):
    """A registry was given the same mode label twice."""


class RegistryMismatchError(FockentError, ValueError):
    """Two states built over different registries were combined."""


class NormalizationError(FockentError, ValueError):
    """A state or coefficient table failed a required normalization check."""


class TruncationError(FockentError, ValueError):
    """A bosonic occupation exceeded its cutoff inside a fixed-N construction."""


class SizeGuardError(FockentError, ValueError):
    """A requested computation exceeds the configured dimension guard."""

    def __init__(self, message: str, dimension: int | None = None, guard: int | None = None):
        super().__init__(message)
        self.dimension = dimension
        self.guard = guard


class NumericalInvariantError(FockentError, ValueError):
    """A density matrix or spectrum violated a numerical invariant."""
