"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters or configuration."""


class DimensionError(ValueError):
    """A matrix dimension is out of range."""


class BudgetError(ValueError):
    """Total Hilbert-space dimension exceeds the configured budget."""


class RegimeError(ValueError):
    """A closed-form quantity is undefined for the requested parameters."""


class NumericError(RuntimeError):
    """Numerical failure for a specific realization.

    Carries enough information to reproduce the failing realization.
    """

    def __init__(self, message, master_seed=None, stream_index=None):
        if master_seed is not None:
            message = f"{message} (master_seed={master_seed}, stream_index={stream_index})"
        super().__init__(message)
        self.master_seed = master_seed
        self.stream_index = stream_index
