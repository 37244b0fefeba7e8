from paraproducts.errors.codes import ErrorCode

# code -> (exit status, recoverable)
ERROR_MAP = {
    ErrorCode.SHAPE_MISMATCH: (2, False),
    ErrorCode.LEVEL_OUT_OF_RANGE: (2, False),
    ErrorCode.PARAMETER_OUT_OF_RANGE: (2, False),
    ErrorCode.NOT_MEASURABLE: (2, False),
    ErrorCode.NON_FINITE_INPUT: (2, False),
    ErrorCode.NOT_HERMITIAN: (2, False),
    ErrorCode.NOT_POSITIVE_SEMIDEFINITE: (2, False),
    ErrorCode.INVALID_INPUT: (2, False),
    ErrorCode.USAGE: (2, False),
    ErrorCode.SPECTRAL_FAILURE: (1, False),
    ErrorCode.INVARIANT_VIOLATION: (1, False),
    ErrorCode.BUDGET_EXCEEDED: (3, False),
    ErrorCode.CACHE_CORRUPT: (0, True),
    ErrorCode.INTERNAL: (70, False),
}


def map_error(code: ErrorCode | None) -> tuple[int, bool]:
    if code is None:
        return (70, False)
    return ERROR_MAP.get(code, (70, False))
