"""Seeded generators for fuzzing symbols, test functions and unit vectors."""

from __future__ import annotations

import numpy as np

from paraproducts.dyadic import (
    HaarLayer,
    MatrixStepFunction,
    VectorStepFunction,
    conditional_expectation,
    reconstruct,
)
from paraproducts.symbol_norms import linf_norm


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_symbol(
    rng: np.random.Generator,
    n: int,
    depth: int,
    *,
    contractive: bool = False,
    real: bool = False,
) -> MatrixStepFunction:
    """
    Symbol with i.i.d. complex Gaussian Haar coefficients; level-k coefficients
    are scaled by 1/sqrt(k). With contractive=True the result is projected to
    the L∞ unit ball by b ↦ b·min(1, 1/‖b‖_∞).
    """

    def draw(shape: tuple[int, ...]) -> np.ndarray:
        if real:
            return rng.standard_normal(shape).astype(np.complex128)
        return complex_gaussian(rng, shape)

    mean = draw((n, n))
    layers = [
        HaarLayer(
            level=k,
            coefficients=draw((2 ** (k - 1), n, n)) / np.sqrt(k),
            kind="matrix",
        )
        for k in range(1, depth + 1)
    ]
    b = reconstruct(mean, layers, depth, "matrix")
    assert isinstance(b, MatrixStepFunction)
    if contractive:
        norm = linf_norm(b)
        if norm > 1.0:
            b = b * (1.0 / norm)
    return b


def random_matrix_function(
    rng: np.random.Generator, n: int, depth: int
) -> MatrixStepFunction:
    return MatrixStepFunction(complex_gaussian(rng, (2**depth, n, n)))


def random_vector_function(
    rng: np.random.Generator, n: int, depth: int
) -> VectorStepFunction:
    return VectorStepFunction(complex_gaussian(rng, (2**depth, n)))


def random_measurable(
    rng: np.random.Generator, n: int, depth: int, m: int
) -> MatrixStepFunction:
    """Random F_m-measurable matrix function represented at depth K."""
    F = conditional_expectation(random_matrix_function(rng, n, depth), m)
    assert isinstance(F, MatrixStepFunction)
    return F


def random_psd_measurable(
    rng: np.random.Generator, n: int, depth: int, m: int
) -> MatrixStepFunction:
    """Random PSD-valued F_m-measurable function a = G^*G, G F_m-measurable."""
    G = random_measurable(rng, n, depth, m)
    return MatrixStepFunction(np.conj(np.swapaxes(G.values, 1, 2)) @ G.values)


def random_unit_vector(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    v = rng.standard_normal(n) if real else complex_gaussian(rng, (n,))
    return np.asarray(v, dtype=np.complex128) / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction of R's diagonal."""
    Z = complex_gaussian(rng, (n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]
