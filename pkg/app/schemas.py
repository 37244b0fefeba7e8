from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.errors import SymbolDocumentError
from paraproducts.dyadic import MatrixStepFunction


class SymbolDocument(BaseModel):
    """
    JSON form of an M_n-valued symbol:
    {"n": int, "depth": int, "values": [[[re, im], ...], ...]}
    with one entry per finest atom holding the n·n entries row-major.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    depth: int = Field(ge=0)
    values: List[List[List[float]]]

    @model_validator(mode="after")
    def _check_shape(self) -> "SymbolDocument":
        if len(self.values) != 2**self.depth:
            raise ValueError(
                f"expected {2 ** self.depth} atoms for depth {self.depth}, got {len(self.values)}"
            )
        for j, atom in enumerate(self.values):
            if len(atom) != self.n * self.n:
                raise ValueError(f"atom {j}: expected {self.n * self.n} entries, got {len(atom)}")
            for pair in atom:
                if len(pair) != 2:
                    raise ValueError(f"atom {j}: entries must be [re, im] pairs")
                if not all(math.isfinite(x) for x in pair):
                    raise ValueError(f"atom {j}: non-finite entry")
        return self

    def to_step_function(self) -> MatrixStepFunction:
        arr = np.asarray(self.values, dtype=np.float64)
        values = (arr[..., 0] + 1j * arr[..., 1]).reshape(2**self.depth, self.n, self.n)
        return MatrixStepFunction(values)

    @classmethod
    def from_step_function(cls, F: MatrixStepFunction) -> "SymbolDocument":
        flat = F.values.reshape(F.atoms, F.n * F.n)
        return cls(
            n=F.n,
            depth=F.depth,
            values=[[[float(z.real), float(z.imag)] for z in atom] for atom in flat],
        )


def load_symbol(path: str | Path) -> MatrixStepFunction:
    p = Path(path)
    if not p.exists():
        raise SymbolDocumentError(f"symbol file not found: {p}")
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise SymbolDocumentError(f"cannot read symbol document {p}: {exc}") from exc
    try:
        doc = SymbolDocument.model_validate_json(text)
    except ValidationError as exc:
        raise SymbolDocumentError(
            f"invalid symbol document {p}",
            details=[str(e["msg"]) for e in exc.errors()],
        ) from exc
    return doc.to_step_function()


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class ExperimentRecord(BaseModel):
    """One cached experiment run; self-describing (parameters embedded)."""

    experiment: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    outputs: Dict[str, Any] = Field(default_factory=dict)
    wall_time_s: float = 0.0
    version: str = "dev"
    cache_key: str = ""

    @staticmethod
    def key_for(experiment: str, parameters: Dict[str, Any]) -> str:
        """sha256 of the canonical JSON of (experiment, parameters)."""
        blob = canonical_json({"experiment": experiment, "parameters": parameters})
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @model_validator(mode="after")
    def _fill_key(self) -> "ExperimentRecord":
        if not self.cache_key:
            self.cache_key = self.key_for(self.experiment, self.parameters)
        return self
