"""Exception and warning types shared across the package."""


class RankError(ValueError):
    """Input matrix is rank deficient where full rank is required."""


class DimensionError(ValueError):
    """Dimensions of subspaces/bodies are inconsistent or out of range."""


class ScopeError(ValueError):
    """Requested configuration is outside the supported desk-scale scope."""


class PrecisionError(RuntimeError):
    """A quadrature or iterative solve failed to reach its tolerance."""


class PolynomialFitError(RuntimeError):
    """Polynomial fit residual exceeds threshold (sample budget too small)."""


class ConditioningWarning(UserWarning):
    """Least-squares design matrix is ill conditioned."""
