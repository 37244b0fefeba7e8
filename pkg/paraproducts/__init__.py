"""Matrix-valued dyadic paraproducts: operators, norms and extremal witnesses."""

from paraproducts.dyadic import (
    DyadicAtom,
    HaarLayer,
    MatrixStepFunction,
    VectorStepFunction,
    conditional_expectation,
    martingale_difference,
)
from paraproducts.operators import (
    adjoint_paraproduct_apply,
    make_paraproduct_handle,
    paraproduct_apply,
    tilde_paraproduct_apply,
)
from paraproducts.spectral import LinearOperatorHandle
from paraproducts.types import NormEstimate, WitnessBundle

__all__ = [
    "DyadicAtom",
    "HaarLayer",
    "LinearOperatorHandle",
    "MatrixStepFunction",
    "NormEstimate",
    "VectorStepFunction",
    "WitnessBundle",
    "adjoint_paraproduct_apply",
    "conditional_expectation",
    "make_paraproduct_handle",
    "martingale_difference",
    "paraproduct_apply",
    "tilde_paraproduct_apply",
]
