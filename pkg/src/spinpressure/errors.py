"""Exception types shared across the package."""


class SpinPressureError(Exception):
    pass


class NonHermitianError(SpinPressureError, ValueError):
    """Input required to be hermitian is not (1e-13 entrywise)."""


class DimensionMismatchError(SpinPressureError, ValueError):
    pass


class BudgetExceededError(SpinPressureError, RuntimeError):
    """Requested volume exceeds the configured memory budget."""


class ReducibleMatrixError(SpinPressureError, ValueError):
    """Transition matrix is reducible; spectral data is not unique."""


class UndecidablePrefixError(SpinPressureError, ValueError):
    """Stored frequency prefix is too short to decide the query."""


class SeriesConvergenceError(SpinPressureError, RuntimeError):
    """Time-evolution series failed to reach tolerance within max_terms."""


class ModelFormatError(SpinPressureError, ValueError):
    """Model file is syntactically or semantically invalid."""
