from __future__ import annotations

from dataclasses import dataclass

from paraproducts.errors.codes import ErrorCode
from paraproducts.errors.exceptions import LabError


# Unreadable or malformed symbol documents (exit 2)
@dataclass
class SymbolDocumentError(LabError):
    code: ErrorCode = ErrorCode.INVALID_INPUT
