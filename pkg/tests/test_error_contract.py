from __future__ import annotations

import pytest

from app.errors import SymbolDocumentError
from paraproducts.errors.codes import ErrorCode
from paraproducts.errors.exceptions import (
    BudgetExceededError,
    LabError,
    MeasurabilityError,
    NotPositiveSemidefiniteError,
    ShapeMismatchError,
    SpectralError,
)
from paraproducts.errors.mapper import ERROR_MAP, map_error


@pytest.mark.parametrize(
    "exc,status",
    [
        (ShapeMismatchError("bad shape"), 2),
        (MeasurabilityError("not measurable"), 2),
        (NotPositiveSemidefiniteError("negative"), 2),
        (SymbolDocumentError("bad json"), 2),
        (LabError("bad flag", code=ErrorCode.USAGE), 2),
        (SpectralError("svd failed"), 1),
        (LabError("bound broken", code=ErrorCode.INVARIANT_VIOLATION), 1),
        (BudgetExceededError("too large"), 3),
        (LabError("boom"), 70),
    ],
)
def test_exit_status_per_error(exc, status):
    assert map_error(exc.code) == (status, False)


def test_every_code_is_mapped():
    assert set(ERROR_MAP) == set(ErrorCode)
    assert map_error(None) == (70, False)


def test_corrupt_cache_is_recoverable():
    assert map_error(ErrorCode.CACHE_CORRUPT) == (0, True)


def test_error_carries_details_and_message():
    err = SymbolDocumentError("invalid symbol", details=["values: expected 4 atoms"])
    assert str(err) == "invalid symbol"
    assert err.code is ErrorCode.INVALID_INPUT
    assert err.details == ["values: expected 4 atoms"]
    assert isinstance(err, LabError)
