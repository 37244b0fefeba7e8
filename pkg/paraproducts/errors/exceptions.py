from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from paraproducts.errors.codes import ErrorCode


@dataclass
class LabError(Exception):
    """Base class for domain-level errors raised by the numerical kernels."""

    message: str
    code: ErrorCode = ErrorCode.INTERNAL
    extra: Dict[str, Any] = field(default_factory=dict)
    details: Optional[List[str]] = None

    def __str__(self) -> str:
        return self.message


# --- input / domain errors ---
@dataclass
class ShapeMismatchError(LabError):
    code: ErrorCode = ErrorCode.SHAPE_MISMATCH


@dataclass
class LevelOutOfRangeError(LabError):
    code: ErrorCode = ErrorCode.LEVEL_OUT_OF_RANGE


@dataclass
class ParameterError(LabError):
    code: ErrorCode = ErrorCode.PARAMETER_OUT_OF_RANGE


@dataclass
class MeasurabilityError(LabError):
    code: ErrorCode = ErrorCode.NOT_MEASURABLE


# --- spectral kernels ---
@dataclass
class NonFiniteInputError(LabError):
    code: ErrorCode = ErrorCode.NON_FINITE_INPUT


@dataclass
class NotHermitianError(LabError):
    code: ErrorCode = ErrorCode.NOT_HERMITIAN


@dataclass
class NotPositiveSemidefiniteError(LabError):
    code: ErrorCode = ErrorCode.NOT_POSITIVE_SEMIDEFINITE


@dataclass
class SpectralError(LabError):
    code: ErrorCode = ErrorCode.SPECTRAL_FAILURE


# --- harness ---
@dataclass
class BudgetExceededError(LabError):
    code: ErrorCode = ErrorCode.BUDGET_EXCEEDED
