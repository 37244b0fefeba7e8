from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional

import numpy as np

from paraproducts.dyadic import MatrixStepFunction, StepFunction, VectorStepFunction

Method = Literal[
    "exact-svd", "power-iteration", "ascent-lower-bound", "pairing-lower-bound"
]
Certification = Literal["exact", "lower-bound", "heuristic"]


# =====================
# Norm estimates
# =====================


@dataclass(frozen=True)
class NormEstimate:
    """
    A computed norm value.

    certification == "lower-bound" means the value is a Rayleigh quotient or
    an achieved ratio at a concrete witness, so it never exceeds the true norm.
    """

    value: float
    method: Method
    certification: Certification
    iterations: int = 0
    residual: float = 0.0

    # Argmax input where one exists (power iteration vector, ascent witness)
    witness: Optional[StepFunction] = field(default=None, compare=False, repr=False)
    notes: Dict[str, Any] = field(default_factory=dict, compare=False)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "method": self.method,
            "certification": self.certification,
            "iterations": self.iterations,
            "residual": self.residual,
        }


# =====================
# Symbol norms
# =====================


@dataclass(frozen=True)
class SymbolReport:
    linf: float
    bmo_c: float
    bmo_r: float
    bmo_cr: float
    n: int
    K: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "K": self.K,
            "linf": self.linf,
            "bmo_c": self.bmo_c,
            "bmo_r": self.bmo_r,
            "bmo_cr": self.bmo_cr,
        }


# =====================
# Extremal witnesses
# =====================


@dataclass(frozen=True, eq=False)
class WitnessBundle:
    """α, β, D, M = T(α⊗β), V, b = D·V·D, f = Dα, g = Dβ and the realised pairing."""

    n: int
    alpha: np.ndarray
    beta: np.ndarray
    D: MatrixStepFunction
    M: np.ndarray
    V: np.ndarray
    b: MatrixStepFunction
    f: VectorStepFunction
    g: VectorStepFunction
    pairing_value: float
    warnings: List[str] = field(default_factory=list)


# =====================
# Experiment outputs
# =====================


@dataclass(frozen=True)
class GrowthRow:
    n: int
    value: float
    ratio_to_log: float
    method: str
    certification: Certification = "lower-bound"
    extra: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "n": self.n,
            "lower_bound": self.value,
            "ratio_to_log": self.ratio_to_log,
            "method": self.method,
            "certification": self.certification,
        }
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one asserted invariant inside an experiment suite."""

    name: str
    ok: bool
    value: float
    bound: float
    notes: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        # numpy scalars would not survive the JSON cache round trip
        object.__setattr__(self, "ok", bool(self.ok))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "bound", float(self.bound))


@dataclass(frozen=True)
class ExperimentOutcome:
    """Table rows plus asserted checks of one suite; ok iff every check holds."""

    name: str
    columns: List[str]
    rows: List[Dict[str, Any]]
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def violations(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.ok]
