"""Common randomness from noisy EPR pairs.

Bounds, operator-inequality checks and protocol evaluation for two parties
sharing copies of the two-qubit isotropic state.
"""

from .errors import (
    DimensionError,
    DomainError,
    InvalidStrategyError,
    IsocrError,
    NotHermitianError,
    NotPSDError,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "DomainError",
    "InvalidStrategyError",
    "IsocrError",
    "NotHermitianError",
    "NotPSDError",
    "__version__",
]
