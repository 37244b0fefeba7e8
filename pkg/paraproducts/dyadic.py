"""
Dyadic filtration on [0, 1): step functions, conditional expectations E_k,
martingale differences d_k, Rademacher functions and the L² geometry.

A depth-K step function stores one value per finest atom (K, j), j < 2^K.
Level-k atoms are contiguous blocks of 2^(K-k) finest atoms, so E_k is a
reshape-and-mean and every d_k is a Haar layer: +c on the left child and
-c on the right child of each level-(k-1) atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Tuple, TypeVar, Union

import numpy as np

from paraproducts.errors.exceptions import (
    LevelOutOfRangeError,
    NonFiniteInputError,
    ShapeMismatchError,
)

Kind = Literal["vector", "matrix"]

_SF = TypeVar("_SF", bound="StepFunction")


@dataclass(frozen=True)
class DyadicAtom:
    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0 or not (0 <= self.index < 2**self.level):
            raise LevelOutOfRangeError(
                f"atom ({self.level}, {self.index}) is not a dyadic atom",
                extra={"level": self.level, "index": self.index},
            )

    @property
    def interval(self) -> Tuple[float, float]:
        width = 2.0**-self.level
        return (self.index * width, (self.index + 1) * width)

    def parent(self) -> "DyadicAtom":
        if self.level == 0:
            raise LevelOutOfRangeError("the level-0 atom has no parent")
        return DyadicAtom(self.level - 1, self.index // 2)

    def children(self) -> Tuple["DyadicAtom", "DyadicAtom"]:
        return (
            DyadicAtom(self.level + 1, 2 * self.index),
            DyadicAtom(self.level + 1, 2 * self.index + 1),
        )

    def finest_slice(self, depth: int) -> slice:
        """Range of depth-K atom indices covered by this atom."""
        if self.level > depth:
            raise LevelOutOfRangeError(
                f"atom level {self.level} exceeds depth {depth}",
                extra={"level": self.level, "depth": depth},
            )
        span = 2 ** (depth - self.level)
        return slice(self.index * span, (self.index + 1) * span)


class StepFunction:
    """
    Piecewise-constant function on the depth-K dyadic partition.

    Values are copied into a read-only complex128 array of shape
    (2^K,) + value_shape. Instances are immutable and safe to share.
    """

    kind: Kind
    _value_ndim: int

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray) -> None:
        arr = np.array(values, dtype=np.complex128, copy=True)
        if arr.ndim != 1 + self._value_ndim:
            raise ShapeMismatchError(
                f"{type(self).__name__} expects a {1 + self._value_ndim}-d value array, "
                f"got shape {arr.shape}"
            )
        count = arr.shape[0]
        if count < 1 or count & (count - 1):
            raise ShapeMismatchError(
                f"number of atoms must be a power of two, got {count}",
                extra={"atoms": count},
            )
        if self._value_ndim == 2 and arr.shape[1] != arr.shape[2]:
            raise ShapeMismatchError(f"values must be square matrices, got {arr.shape[1:]}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("step function values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError(f"{type(self).__name__} is immutable")

    # ------------------------------ shape ------------------------------ #
    @property
    def depth(self) -> int:
        return int(self.values.shape[0]).bit_length() - 1

    @property
    def n(self) -> int:
        return int(self.values.shape[1])

    @property
    def atoms(self) -> int:
        return int(self.values.shape[0])

    def same_shape(self, other: "StepFunction") -> bool:
        return type(self) is type(other) and self.values.shape == other.values.shape

    def with_values(self: _SF, values: np.ndarray) -> _SF:
        return type(self)(values)

    # ---------------------------- arithmetic ---------------------------- #
    def _check_same(self, other: "StepFunction") -> None:
        if not self.same_shape(other):
            raise ShapeMismatchError(
                "step functions differ in kind, dimension or depth",
                extra={"left": self.values.shape, "right": other.values.shape},
            )

    def __add__(self: _SF, other: _SF) -> _SF:
        self._check_same(other)
        return self.with_values(self.values + other.values)

    def __sub__(self: _SF, other: _SF) -> _SF:
        self._check_same(other)
        return self.with_values(self.values - other.values)

    def __neg__(self: _SF) -> _SF:
        return self.with_values(-self.values)

    def __mul__(self: _SF, scalar: complex) -> _SF:
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, depth={self.depth})"

    def allclose(self, other: "StepFunction", atol: float = 1e-12) -> bool:
        return self.same_shape(other) and bool(
            np.allclose(self.values, other.values, rtol=0.0, atol=atol)
        )


class VectorStepFunction(StepFunction):
    """ℓ²_n-valued step function (f ∈ L²(ℓ²_n))."""

    kind: Kind = "vector"
    _value_ndim = 1
    __slots__ = ()

    @classmethod
    def zeros(cls, n: int, depth: int) -> "VectorStepFunction":
        return cls(np.zeros((2**depth, n), dtype=np.complex128))

    @classmethod
    def constant(cls, vector: np.ndarray, depth: int) -> "VectorStepFunction":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        return cls(np.broadcast_to(v, (2**depth, v.shape[0])))


class MatrixStepFunction(StepFunction):
    """M_n-valued step function (a symbol b, or an element of L^p(T)⊗M_n)."""

    kind: Kind = "matrix"
    _value_ndim = 2
    __slots__ = ()

    @classmethod
    def zeros(cls, n: int, depth: int) -> "MatrixStepFunction":
        return cls(np.zeros((2**depth, n, n), dtype=np.complex128))

    @classmethod
    def constant(cls, matrix: np.ndarray, depth: int) -> "MatrixStepFunction":
        a = np.asarray(matrix, dtype=np.complex128)
        return cls(np.broadcast_to(a, (2**depth,) + a.shape))

    @classmethod
    def identity(cls, n: int, depth: int) -> "MatrixStepFunction":
        return cls.constant(np.eye(n), depth)

    @classmethod
    def from_scalar(
        cls, scalar: VectorStepFunction, matrix: np.ndarray
    ) -> "MatrixStepFunction":
        """t ↦ s(t)·A for a scalar (n = 1) step function s."""
        if scalar.n != 1:
            raise ShapeMismatchError("from_scalar expects an n=1 step function")
        a = np.asarray(matrix, dtype=np.complex128)
        return cls(scalar.values[:, 0, None, None] * a[None, :, :])

    def adjoint(self) -> "MatrixStepFunction":
        """Pointwise adjoint t ↦ F(t)^*."""
        return MatrixStepFunction(np.conj(np.swapaxes(self.values, 1, 2)))


AnyStepFunction = Union[VectorStepFunction, MatrixStepFunction]


# ---------------------------------------------------------------------------
# Haar layers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HaarLayer:
    """
    d_k F stored per level-(k-1) atom: the layer equals +coefficient on the
    left child and -coefficient on the right child of each atom.
    """

    level: int
    coefficients: np.ndarray
    kind: Kind

    @property
    def n(self) -> int:
        return int(self.coefficients.shape[1])

    def expand(self, depth: int) -> AnyStepFunction:
        if not (1 <= self.level <= depth):
            raise LevelOutOfRangeError(
                f"cannot expand a level-{self.level} layer at depth {depth}",
                extra={"level": self.level, "depth": depth},
            )
        block = 2 ** (depth - self.level + 1)
        coarse = np.repeat(self.coefficients, block, axis=0)
        sign = haar_signs(self.level, depth)
        shape = (-1,) + (1,) * (coarse.ndim - 1)
        values = coarse * sign.reshape(shape)
        if self.kind == "matrix":
            return MatrixStepFunction(values)
        return VectorStepFunction(values)

    def is_zero(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coefficients) <= atol))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _check_level(k: int, lo: int, hi: int, what: str) -> None:
    if not (lo <= k <= hi):
        raise LevelOutOfRangeError(
            f"{what} level {k} outside [{lo}, {hi}]",
            extra={"level": k, "low": lo, "high": hi},
        )


def atom_means(F: AnyStepFunction, k: int) -> np.ndarray:
    """Average of F over each level-k atom; shape (2^k,) + value_shape."""
    _check_level(k, 0, F.depth, "conditional expectation")
    vals = F.values
    return vals.reshape((2**k, 2 ** (F.depth - k)) + vals.shape[1:]).mean(axis=1)


def expand_atoms(coarse: np.ndarray, depth: int) -> np.ndarray:
    """Replicate per-atom values of a coarser level down to the finest level."""
    level = int(coarse.shape[0]).bit_length() - 1
    return np.repeat(coarse, 2 ** (depth - level), axis=0)


def haar_signs(level: int, depth: int) -> np.ndarray:
    """The Rademacher pattern r_level sampled on the depth-K atoms."""
    j = np.arange(2**depth)
    return 1.0 - 2.0 * ((j >> (depth - level)) & 1)


def conditional_expectation(F: AnyStepFunction, k: int) -> AnyStepFunction:
    """E_k F, represented at the same depth as F."""
    return F.with_values(expand_atoms(atom_means(F, k), F.depth))


def martingale_difference(F: AnyStepFunction, k: int) -> HaarLayer:
    """d_k F = E_k F - E_{k-1} F as a Haar layer."""
    _check_level(k, 1, F.depth, "martingale difference")
    means = atom_means(F, k)
    pairs = means.reshape((2 ** (k - 1), 2) + means.shape[1:])
    coeff = 0.5 * (pairs[:, 0] - pairs[:, 1])
    return HaarLayer(level=k, coefficients=coeff, kind=F.kind)


def haar_decomposition(F: AnyStepFunction) -> Tuple[np.ndarray, list[HaarLayer]]:
    """
    All levels at once: (E_0 F value, [d_1 F, ..., d_K F]).

    Means are computed bottom-up by pairwise averaging, which costs
    O(2^K) value operations in total instead of O(K·2^K).
    """
    layers: list[HaarLayer] = []
    means = F.values
    for k in range(F.depth, 0, -1):
        pairs = means.reshape((2 ** (k - 1), 2) + means.shape[1:])
        layers.append(
            HaarLayer(level=k, coefficients=0.5 * (pairs[:, 0] - pairs[:, 1]), kind=F.kind)
        )
        means = pairs.mean(axis=1)
    layers.reverse()
    return means[0], layers


def reconstruct(
    mean: np.ndarray, layers: list[HaarLayer], depth: int, kind: Kind
) -> AnyStepFunction:
    """E_0 F + Σ_k d_k F, the inverse of haar_decomposition."""
    values = np.broadcast_to(np.asarray(mean), (2**depth,) + np.shape(mean)).astype(
        np.complex128
    )
    for layer in layers:
        values = values + layer.expand(depth).values
    return MatrixStepFunction(values) if kind == "matrix" else VectorStepFunction(values)


def rademacher(i: int, depth: int) -> VectorStepFunction:
    """r_i: +1 on the left child, -1 on the right child of every level-(i-1) atom."""
    if i < 1:
        raise LevelOutOfRangeError(f"Rademacher index must be >= 1, got {i}")
    if i > depth:
        raise LevelOutOfRangeError(
            f"r_{i} needs depth >= {i}, got {depth}", extra={"i": i, "depth": depth}
        )
    return VectorStepFunction(haar_signs(i, depth)[:, None])


def l2_inner(F: AnyStepFunction, G: AnyStepFunction) -> complex:
    """∫ ⟨F(t), G(t)⟩ dt with tr(A B^*) for matrices and Σ a_i conj(b_i) for vectors."""
    if not F.same_shape(G):
        raise ShapeMismatchError(
            "l2_inner needs matching kind, n and depth",
            extra={"left": F.values.shape, "right": G.values.shape},
        )
    return complex(np.vdot(G.values, F.values)) / F.atoms


def l2_norm(F: AnyStepFunction) -> float:
    return float(np.sqrt(max(l2_inner(F, F).real, 0.0)))


def is_measurable(F: AnyStepFunction, m: int, tol: float = 1e-10) -> bool:
    """True if F is constant on level-m atoms up to tol·(1 + max|F|)."""
    _check_level(m, 0, F.depth, "measurability")
    diff = F.values - expand_atoms(atom_means(F, m), F.depth)
    scale = 1.0 + float(np.max(np.abs(F.values), initial=0.0))
    return bool(np.max(np.abs(diff), initial=0.0) <= tol * scale)


def pointwise_product(A: MatrixStepFunction, B: AnyStepFunction) -> AnyStepFunction:
    """t ↦ A(t)·B(t) for a matrix-valued A and a vector- or matrix-valued B."""
    if A.depth != B.depth or A.n != B.n:
        raise ShapeMismatchError(
            "pointwise product needs matching n and depth",
            extra={"left": A.values.shape, "right": B.values.shape},
        )
    if isinstance(B, MatrixStepFunction):
        return MatrixStepFunction(A.values @ B.values)
    return VectorStepFunction(np.einsum("aij,aj->ai", A.values, B.values))


def indicator(atom: DyadicAtom, n: int, depth: int) -> MatrixStepFunction:
    """1_atom ⊗ I_n."""
    values = np.zeros((2**depth, n, n), dtype=np.complex128)
    values[atom.finest_slice(depth)] = np.eye(n)
    return MatrixStepFunction(values)
