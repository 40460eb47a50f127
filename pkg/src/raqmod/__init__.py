"""Exact expansions and numerics for real-analytic modular forms."""

from .errors import (
    CuspCorrectionRequired,
    DegreeMismatch,
    InternalInconsistency,
    NonDecayingIntegrand,
    ObstructionViolated,
    TailTooLarge,
    WeightError,
)
from .scalar import PeriodScalar, numeric_value
from .series import BiSeries, RAForm

__all__ = [
    "BiSeries",
    "CuspCorrectionRequired",
    "DegreeMismatch",
    "InternalInconsistency",
    "NonDecayingIntegrand",
    "ObstructionViolated",
    "PeriodScalar",
    "RAForm",
    "TailTooLarge",
    "WeightError",
    "numeric_value",
]

__version__ = "0.1.0"
