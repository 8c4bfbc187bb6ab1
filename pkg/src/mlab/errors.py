"""Exception types shared across the library."""

__all__ = [
    "MlabError",
    "GridMismatchError",
    "FrequencyOverflowError",
    "BudgetExceededError",
    "UncoveredSpectrumError",
]


class MlabError(Exception):
    """Base class for library errors."""


class GridMismatchError(MlabError):
    """Operands live on incompatible grids."""


class FrequencyOverflowError(MlabError):
    """A frequency remap would leave the representable band and growth is disabled."""


class BudgetExceededError(MlabError):
    """A frequency-tuple enumeration exceeds the configured budget."""


class UncoveredSpectrumError(MlabError):
    """Input spectrum has energy outside the dyadic partition coverage."""
