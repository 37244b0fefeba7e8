from enum import Enum


class ErrorCode(str, Enum):
    # --- Shapes / domains ---
    SHAPE_MISMATCH = "SHAPE_MISMATCH"
    LEVEL_OUT_OF_RANGE = "LEVEL_OUT_OF_RANGE"
    PARAMETER_OUT_OF_RANGE = "PARAMETER_OUT_OF_RANGE"
    NOT_MEASURABLE = "NOT_MEASURABLE"

    # --- Spectral kernels ---
    NON_FINITE_INPUT = "NON_FINITE_INPUT"
    NOT_HERMITIAN = "NOT_HERMITIAN"
    NOT_POSITIVE_SEMIDEFINITE = "NOT_POSITIVE_SEMIDEFINITE"
    SPECTRAL_FAILURE = "SPECTRAL_FAILURE"

    # --- Experiment harness ---
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    INVALID_INPUT = "INVALID_INPUT"
    USAGE = "USAGE"
    CACHE_CORRUPT = "CACHE_CORRUPT"
    INVARIANT_VIOLATION = "INVARIANT_VIOLATION"

    # --- Internal ---
    INTERNAL = "INTERNAL"
