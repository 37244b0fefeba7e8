"""
Norms and nonlinear functionals of M_n-valued symbols: L∞(M_n), BMO_c,
BMO_r, BMO_cr, the square function S(b) and the sweep S²(b).
"""

from __future__ import annotations

from typing import List

import numpy as np

from paraproducts.dyadic import MatrixStepFunction, expand_atoms, haar_decomposition
from paraproducts.spectral import psd_sqrt_stack, spectral_norms
from paraproducts.types import SymbolReport


def linf_norm(b: MatrixStepFunction) -> float:
    """max over finest atoms of the spectral norm of the atom value."""
    return float(spectral_norms(b.values).max(initial=0.0))


def layer_squares(b: MatrixStepFunction) -> List[np.ndarray]:
    """
    |d_k b|² = (d_k b)^*(d_k b) for k = 1..K, one matrix per level-(k-1) atom.

    The ± signs of a Haar layer cancel in the square, so each entry is
    constant on its level-(k-1) atom.
    """
    _, layers = haar_decomposition(b)
    out = []
    for layer in layers:
        c = layer.coefficients
        out.append(np.conj(np.swapaxes(c, 1, 2)) @ c)
    return out


def _pair_mean(values: np.ndarray) -> np.ndarray:
    return values.reshape((values.shape[0] // 2, 2) + values.shape[1:]).mean(axis=1)


def tail_expectations(
    b: MatrixStepFunction, inclusive: bool = True
) -> List[np.ndarray]:
    """
    For m = 0..K the level-m atom values of E_m Σ_k |d_k b|², the sum running
    over k >= max(m, 1) (inclusive) or k > m (exclusive).
    """
    K, n = b.depth, b.n
    squares = layer_squares(b)
    strict: List[np.ndarray] = [np.zeros((0, n, n))] * (K + 1)
    acc = np.zeros((2**K, n, n), dtype=np.complex128)
    strict[K] = acc
    # strict[m] = E_m Σ_{k>m} |d_k b|² on level-m atoms
    for m in range(K - 1, -1, -1):
        acc = squares[m] + _pair_mean(acc)
        strict[m] = acc
    if not inclusive:
        return strict
    tails = [strict[0]]
    for m in range(1, K + 1):
        tails.append(strict[m] + np.repeat(squares[m - 1], 2, axis=0))
    return tails


def bmo_c_norm(b: MatrixStepFunction, inclusive: bool = True) -> float:
    """sup_m ‖E_m Σ_{k≥m} (d_k b)^*(d_k b)‖^{1/2}, m ranging over 0..K."""
    if b.depth == 0:
        return 0.0
    top = 0.0
    for tail in tail_expectations(b, inclusive=inclusive):
        top = max(top, float(spectral_norms(tail).max(initial=0.0)))
    return float(np.sqrt(top))


def bmo_r_norm(b: MatrixStepFunction, inclusive: bool = True) -> float:
    """‖b‖_{BMO_r} = ‖b^*‖_{BMO_c}."""
    return bmo_c_norm(b.adjoint(), inclusive=inclusive)


def bmo_cr_norm(b: MatrixStepFunction, inclusive: bool = True) -> float:
    return max(bmo_c_norm(b, inclusive), bmo_r_norm(b, inclusive))


def symbol_report(b: MatrixStepFunction) -> SymbolReport:
    bmo_c = bmo_c_norm(b)
    bmo_r = bmo_r_norm(b)
    return SymbolReport(
        linf=linf_norm(b),
        bmo_c=bmo_c,
        bmo_r=bmo_r,
        bmo_cr=max(bmo_c, bmo_r),
        n=b.n,
        K=b.depth,
    )


def sweep(b: MatrixStepFunction) -> MatrixStepFunction:
    """S²(b) = Σ_k |d_k b|², PSD-valued."""
    total = np.zeros_like(b.values)
    for square in layer_squares(b):
        total = total + expand_atoms(square, b.depth)
    return MatrixStepFunction(total)


def square_function(b: MatrixStepFunction) -> MatrixStepFunction:
    """S(b) = (Σ_k |d_k b|²)^{1/2} pointwise."""
    return MatrixStepFunction(psd_sqrt_stack(sweep(b).values))
