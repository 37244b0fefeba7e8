"""
Extremal constructions for the log(n+1) blow-up of contractive paraproducts.

With D = Σ_i r_i e_i⊗e_i at depth n, f = Dα and g = Dβ, the martingale sum
Σ_k (E_{k-1}f)⊗(d_k g) equals D·T(α⊗β)·D, where T keeps the strictly upper
triangle. Pairing against b = D·V·D with V the dual unitary of T(α⊗β)
realises ‖T(α⊗β)‖_{S¹} while ‖b‖_∞ = 1.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np

from paraproducts.dyadic import (
    MatrixStepFunction,
    VectorStepFunction,
    expand_atoms,
    haar_decomposition,
    haar_signs,
    pointwise_product,
)
from paraproducts.errors.exceptions import ParameterError, ShapeMismatchError
from paraproducts.operators import _level_means, paraproduct_apply
from paraproducts.random_symbols import complex_gaussian, random_matrix_function
from paraproducts.spectral import _svd, dual_unitary, schatten_norm, schatten_norms
from paraproducts.symbol_norms import layer_squares
from paraproducts.types import GrowthRow, NormEstimate, WitnessBundle

log = logging.getLogger(__name__)

UNIT_TOL = 1e-12


def rademacher_diagonal(n: int) -> MatrixStepFunction:
    """D(t) = diag(r_1(t), ..., r_n(t)) at depth n."""
    if n < 1:
        raise ParameterError(f"rademacher_diagonal needs n >= 1, got {n}", extra={"n": n})
    signs = np.stack([haar_signs(i, n) for i in range(1, n + 1)], axis=1)
    values = np.zeros((2**n, n, n), dtype=np.complex128)
    idx = np.arange(n)
    values[:, idx, idx] = signs
    return MatrixStepFunction(values)


def triangle_projection(A: np.ndarray) -> np.ndarray:
    """Strictly upper-triangular part (row < column)."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeMismatchError(f"triangle projection needs a square matrix, got {arr.shape}")
    return np.triu(arr, k=1)


def rank_one(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x ⊗ y = x·y^*."""
    return np.outer(np.asarray(x, dtype=np.complex128), np.conj(np.asarray(y, dtype=np.complex128)))


def _unit(v: Optional[np.ndarray], n: int, name: str, warnings: List[str]) -> np.ndarray:
    if v is None:
        return np.ones(n, dtype=np.complex128) / np.sqrt(n)
    arr = np.asarray(v, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != n:
        raise ShapeMismatchError(
            f"{name} must have length {n}, got {arr.shape[0]}", extra={"n": n}
        )
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ParameterError(f"{name} must be nonzero")
    if abs(norm - 1.0) > UNIT_TOL:
        msg = f"{name} had norm {norm:.6g}; normalised to a unit vector"
        log.warning(msg, extra={"vector": name, "norm": norm})
        warnings.append(msg)
        arr = arr / norm
    return arr


def _witness_functions(
    n: int, alpha: np.ndarray, beta: np.ndarray
) -> Tuple[MatrixStepFunction, VectorStepFunction, VectorStepFunction]:
    D = rademacher_diagonal(n)
    f = pointwise_product(D, VectorStepFunction.constant(alpha, n))
    g = pointwise_product(D, VectorStepFunction.constant(beta, n))
    assert isinstance(f, VectorStepFunction) and isinstance(g, VectorStepFunction)
    return D, f, g


def martingale_tensor_sum(f: VectorStepFunction, g: VectorStepFunction) -> np.ndarray:
    """Pointwise Σ_k (E_{k-1}f)⊗(d_k g) as a (2^K, n, n) stack."""
    K = f.depth
    _, g_layers = haar_decomposition(g)
    out = np.zeros((2**K, f.n, f.n), dtype=np.complex128)
    f_means = _level_means(f)
    for layer in g_layers:
        k = layer.level
        e = expand_atoms(f_means[k - 1], K)
        d = layer.expand(K).values
        out += np.einsum("ai,aj->aij", e, np.conj(d))
    return out


def tensor_identity_check(
    n: int, alpha: Optional[np.ndarray] = None, beta: Optional[np.ndarray] = None
) -> float:
    """
    L¹(S¹) distance between Σ_k (E_{k-1}f)⊗(d_k g) and D·T(α⊗β)·D for
    f = Dα, g = Dβ at depth n.
    """
    warnings: List[str] = []
    a = _unit(alpha, n, "alpha", warnings)
    c = _unit(beta, n, "beta", warnings)
    D, f, g = _witness_functions(n, a, c)
    lhs = martingale_tensor_sum(f, g)
    M = triangle_projection(rank_one(a, c))
    rhs = D.values @ M[None, :, :] @ D.values
    return float(np.mean(schatten_norms(lhs - rhs, 1)))


def witness_pairing(
    b: MatrixStepFunction, f: VectorStepFunction, g: VectorStepFunction
) -> float:
    """
    tr ∫ Σ_k d_k b (E_{k-1}f ⊗ d_k g), summed level by level over Haar
    coefficients: each level-(k-1) atom A contributes |A|·⟨c_A e_A, γ_A⟩.
    """
    _, b_layers = haar_decomposition(b)
    _, g_layers = haar_decomposition(g)
    f_means = _level_means(f)
    total = 0.0 + 0.0j
    for bl, gl in zip(b_layers, g_layers):
        k = bl.level
        ce = np.einsum("aij,aj->ai", bl.coefficients, f_means[k - 1])
        total += np.vdot(gl.coefficients, ce) * 2.0 ** (-(k - 1))
    if abs(total.imag) > 1e-8 * max(1.0, abs(total.real)):
        log.warning("witness pairing has an imaginary part", extra={"imag": total.imag})
    return float(total.real)


def witness_matrices(
    n: int,
    alpha: Optional[np.ndarray] = None,
    beta: Optional[np.ndarray] = None,
    warnings: Optional[List[str]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    (α, β, M = T(α⊗β), V) without any step functions. tr(V·M) is the pairing
    realised by the depth-n witness, so growth tables can go far past the
    sizes where 2^n atoms fit in memory.
    """
    if n < 1:
        raise ParameterError(f"witness needs n >= 1, got {n}", extra={"n": n})
    sink: List[str] = [] if warnings is None else warnings
    a = _unit(alpha, n, "alpha", sink)
    c = _unit(beta, n, "beta", sink)
    M = triangle_projection(rank_one(a, c))
    return a, c, M, dual_unitary(M)


def build_witness(
    n: int, alpha: Optional[np.ndarray] = None, beta: Optional[np.ndarray] = None
) -> WitnessBundle:
    """
    The contractive symbol b = D·V·D with V the dual unitary of T(α⊗β);
    α, β default to ones/√n and are normalised (with a warning) if not unit.
    """
    warnings: List[str] = []
    a, c, M, V = witness_matrices(n, alpha, beta, warnings)
    D, f, g = _witness_functions(n, a, c)
    b = MatrixStepFunction(D.values @ V[None, :, :] @ D.values)
    pairing = witness_pairing(b, f, g)
    log.debug(
        "witness built",
        extra={"n": n, "pairing": pairing, "s1": schatten_norm(M, 1)},
    )
    return WitnessBundle(
        n=n,
        alpha=a,
        beta=c,
        D=D,
        M=M,
        V=V,
        b=b,
        f=f,
        g=g,
        pairing_value=pairing,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Triangle projection on rank-one inputs
# ---------------------------------------------------------------------------


def _triangle_value_and_grad(
    alpha: np.ndarray, beta: np.ndarray
) -> Tuple[float, np.ndarray, np.ndarray]:
    M = triangle_projection(rank_one(alpha, beta))
    U, s, Wh = _svd(M)
    G = triangle_projection(U @ Wh)
    return float(np.sum(s)), G @ beta, np.conj(G.T) @ alpha


def _ascend_pair(
    alpha: np.ndarray, beta: np.ndarray, iterations: int
) -> Tuple[float, np.ndarray, np.ndarray]:
    alpha = alpha / np.linalg.norm(alpha)
    beta = beta / np.linalg.norm(beta)
    value, ga, gb = _triangle_value_and_grad(alpha, beta)
    step = 0.5
    for _ in range(iterations):
        gnorm = float(np.sqrt(np.vdot(ga, ga).real + np.vdot(gb, gb).real))
        if gnorm == 0.0 or step < 1e-12:
            break
        improved = False
        for _ in range(30):
            a = alpha + (step / gnorm) * ga
            c = beta + (step / gnorm) * gb
            a = a / np.linalg.norm(a)
            c = c / np.linalg.norm(c)
            cand, cga, cgb = _triangle_value_and_grad(a, c)
            if cand > value:
                alpha, beta, value, ga, gb = a, c, cand, cga, cgb
                step *= 1.5
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return value, alpha, beta


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.complex128)
    out[: v.shape[0]] = v
    return out


def triangle_s1_lower_bound(
    n: int,
    starts: int = 8,
    seed: int = 0,
    *,
    iterations: int = 200,
    warm_start: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> NormEstimate:
    """
    max over ascended unit pairs of ‖T(α⊗β)‖_{S¹}; a lower bound for the
    trace-class norm of T since S¹ is spanned by rank-ones. The maximising
    pair is returned in notes["alpha"], notes["beta"].
    """
    if n < 1:
        raise ParameterError(f"triangle bound needs n >= 1, got {n}", extra={"n": n})
    if n == 1:
        one = np.ones(1, dtype=np.complex128)
        return NormEstimate(
            value=0.0,
            method="ascent-lower-bound",
            certification="lower-bound",
            notes={"alpha": one, "beta": one},
        )
    rng = np.random.default_rng(seed)
    pairs: List[Tuple[np.ndarray, np.ndarray]] = []
    if warm_start is not None:
        pairs.append((_pad(warm_start[0], n), _pad(warm_start[1], n)))
    ones = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    pairs.append((ones, ones))
    e_first = np.zeros(n, dtype=np.complex128)
    e_first[0] = 1.0
    e_last = np.zeros(n, dtype=np.complex128)
    e_last[-1] = 1.0
    pairs.append((e_first, e_last))
    for _ in range(starts):
        pairs.append((complex_gaussian(rng, (n,)), complex_gaussian(rng, (n,))))

    best = (-1.0, ones, ones)
    for a, c in pairs:
        value, a, c = _ascend_pair(a, c, iterations)
        if value > best[0]:
            best = (value, a, c)
    value, a, c = best
    achieved = schatten_norm(triangle_projection(rank_one(a, c)), 1)
    return NormEstimate(
        value=float(achieved),
        method="ascent-lower-bound",
        certification="lower-bound",
        iterations=iterations * len(pairs),
        notes={"alpha": a, "beta": c, "starts": len(pairs)},
    )


def triangle_growth(
    n_list: Iterable[int], starts: int = 8, seed: int = 0, *, iterations: int = 200
) -> List[GrowthRow]:
    """
    Lower bounds for n in increasing order; each n warm-starts from the
    zero-padded witness of the previous n, so the column is nondecreasing.
    """
    rows: List[GrowthRow] = []
    previous: Optional[Tuple[np.ndarray, np.ndarray]] = None
    for n in sorted(set(n_list)):
        est = triangle_s1_lower_bound(
            n, starts, seed, iterations=iterations, warm_start=previous
        )
        previous = (est.notes["alpha"], est.notes["beta"])
        rows.append(
            GrowthRow(
                n=n,
                value=est.value,
                ratio_to_log=est.value / np.log(n + 1),
                method=est.method,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Sweep decomposition
# ---------------------------------------------------------------------------


def pairing_decomposition(
    b: MatrixStepFunction, f: MatrixStepFunction
) -> Tuple[float, float, float]:
    """
    (I, II, total) with total = ‖π_b f‖²_{L²(S²)} and, writing S_i = Σ_{k>i}|d_k b|²,
      I  = tr ∫ Σ_i S_i·(d_i f)(d_i f)^*
      II = tr ∫ Σ_i S_i·((E_{i-1}f)(d_i f)^* + (d_i f)(E_{i-1}f)^*)
    with i = 0..K, d_0 f = E_0 f and E_{-1} f = 0.
    """
    if b.n != f.n or b.depth != f.depth:
        raise ShapeMismatchError(
            "pairing decomposition needs matching n and depth",
            extra={"symbol": b.values.shape, "argument": f.values.shape},
        )
    K = b.depth
    h = paraproduct_apply(b, f)
    total = float(np.vdot(h.values, h.values).real / h.atoms)

    squares = [expand_atoms(sq, K) for sq in layer_squares(b)]
    # tails[i] = Σ_{k>i} |d_k b|², i = 0..K
    tails = [np.zeros((2**K, b.n, b.n), dtype=np.complex128) for _ in range(K + 1)]
    for i in range(K - 1, -1, -1):
        tails[i] = tails[i + 1] + squares[i]

    mean, f_layers = haar_decomposition(f)
    diffs = [np.broadcast_to(mean, f.values.shape)] + [ly.expand(K).values for ly in f_layers]
    partial = np.zeros_like(f.values)
    part_one = 0.0
    part_two = 0.0
    for i in range(K + 1):
        d = diffs[i]
        d_ct = np.conj(np.swapaxes(d, 1, 2))
        prev_ct = np.conj(np.swapaxes(partial, 1, 2))
        part_one += float(np.trace(tails[i] @ d @ d_ct, axis1=1, axis2=2).real.mean())
        cross = partial @ d_ct + d @ prev_ct
        part_two += float(np.trace(tails[i] @ cross, axis1=1, axis2=2).real.mean())
        partial = partial + d
    return part_one, part_two, total


def pairing_decomposition_check(n: int, seed: int = 0) -> Tuple[float, float, float]:
    """(I, II, total) for the ones/√n witness symbol and a seeded random f."""
    b = build_witness(n).b
    rng = np.random.default_rng(seed)
    f = random_matrix_function(rng, n, b.depth)
    return pairing_decomposition(b, f)
