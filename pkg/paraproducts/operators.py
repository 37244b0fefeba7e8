"""
Paraproducts π_b f = Σ_k (d_k b)(E_{k-1} f), their tilde and adjoint-symbol
variants, the tail multipliers L_m / R_m and the norm estimators built on them.

All operators work level by level on Haar coefficients: a level-k layer of b
times the level-(k-1) means of f is again a level-k Haar pattern, so one
apply costs O(K·2^K·n²) (vectors) or O(K·2^K·n³) (matrices).
"""

from __future__ import annotations

import logging
from typing import List, Literal, Optional, Tuple

import numpy as np

from paraproducts.ascent import (
    DEFAULT_ITERATIONS,
    DEFAULT_STARTS,
    AscentConfig,
    constant_starts,
    ratio_lower_bound,
)
from paraproducts.dyadic import (
    AnyStepFunction,
    HaarLayer,
    Kind,
    MatrixStepFunction,
    VectorStepFunction,
    atom_means,
    conditional_expectation,
    expand_atoms,
    haar_decomposition,
    is_measurable,
    martingale_difference,
)
from paraproducts.errors.exceptions import (
    LevelOutOfRangeError,
    MeasurabilityError,
    ParameterError,
    ShapeMismatchError,
)
from paraproducts.spectral import (
    DEFAULT_MAX_ITER,
    DEFAULT_RESTARTS,
    DEFAULT_TOL,
    LinearOperatorHandle,
    _svd,
    clip_spectrum,
    operator_norm_power,
)
from paraproducts.symbol_norms import bmo_cr_norm, linf_norm, tail_expectations
from paraproducts.types import NormEstimate

log = logging.getLogger(__name__)

Variant = Literal["plain", "tilde", "adjoint"]
Side = Literal["left", "right"]

VARIANTS: Tuple[str, ...] = ("plain", "tilde", "adjoint")

MEASURABILITY_TOL = 1e-10


# ---------------------------------------------------------------------------
# Level-by-level kernels
# ---------------------------------------------------------------------------


def _ct(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def _check_pair(b: MatrixStepFunction, f: AnyStepFunction, what: str) -> None:
    if not isinstance(b, MatrixStepFunction):
        raise ShapeMismatchError(f"{what}: symbol must be matrix-valued")
    if b.n != f.n or b.depth != f.depth:
        raise ShapeMismatchError(
            f"{what}: symbol and argument differ in n or depth",
            extra={"symbol": b.values.shape, "argument": f.values.shape},
        )


def _level_means(F: AnyStepFunction) -> List[np.ndarray]:
    """means[m] = level-m atom values of E_m F, m = 0..K."""
    means = [F.values]
    for _ in range(F.depth):
        cur = means[-1]
        means.append(cur.reshape((cur.shape[0] // 2, 2) + cur.shape[1:]).mean(axis=1))
    means.reverse()
    return means


def _times(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Per-atom product A·B; B is a stack of vectors or of matrices."""
    if B.ndim == 2:
        return np.einsum("aij,aj->ai", A, B)
    return A @ B


def _forward(
    layers: List[HaarLayer],
    f: AnyStepFunction,
    *,
    right: bool = False,
    conj: bool = False,
) -> AnyStepFunction:
    """Σ_k c_k·E_{k-1}f (or E_{k-1}f·c_k when right), c_k = d_k b or (d_k b)^*."""
    means = _level_means(f)
    out = np.zeros_like(f.values)
    for layer in layers:
        c = _ct(layer.coefficients) if conj else layer.coefficients
        e = means[layer.level - 1]
        prod = e @ c if right else _times(c, e)
        out += HaarLayer(layer.level, prod, f.kind).expand(f.depth).values
    return f.with_values(out)


def _backward(
    layers: List[HaarLayer],
    g: AnyStepFunction,
    *,
    right: bool = False,
    conj: bool = False,
) -> AnyStepFunction:
    """
    L²-adjoint of _forward with the same flags. The product of two level-k
    Haar patterns is constant on level-(k-1) atoms, so each term is expanded
    without signs.
    """
    _, g_layers = haar_decomposition(g)
    out = np.zeros_like(g.values)
    for layer, gamma in zip(layers, g_layers):
        c = layer.coefficients if conj else _ct(layer.coefficients)
        prod = gamma.coefficients @ c if right else _times(c, gamma.coefficients)
        out += expand_atoms(prod, g.depth)
    return g.with_values(out)


# ---------------------------------------------------------------------------
# Paraproducts
# ---------------------------------------------------------------------------


def paraproduct_apply(b: MatrixStepFunction, f: AnyStepFunction) -> AnyStepFunction:
    """π_b(f) = Σ_k (d_k b)(E_{k-1} f); matrix f is multiplied on the left."""
    _check_pair(b, f, "paraproduct")
    _, layers = haar_decomposition(b)
    return _forward(layers, f)


def tilde_paraproduct_apply(
    b: MatrixStepFunction, f: MatrixStepFunction
) -> MatrixStepFunction:
    """π̃_b(f) = Σ_k (E_{k-1} f)(d_k b)."""
    _check_pair(b, f, "tilde paraproduct")
    if not isinstance(f, MatrixStepFunction):
        raise ShapeMismatchError("tilde paraproduct acts on matrix-valued functions only")
    _, layers = haar_decomposition(b)
    out = _forward(layers, f, right=True)
    assert isinstance(out, MatrixStepFunction)
    return out


def adjoint_paraproduct_apply(
    b: MatrixStepFunction, f: AnyStepFunction
) -> AnyStepFunction:
    """Σ_k (d_k b)^*(E_{k-1} f), which is π_{b*}(f)."""
    _check_pair(b, f, "adjoint paraproduct")
    _, layers = haar_decomposition(b)
    return _forward(layers, f, conj=True)


def paraproduct_dual_apply(
    b: MatrixStepFunction, g: AnyStepFunction, variant: Variant = "plain"
) -> AnyStepFunction:
    """
    The L²-adjoint of the chosen variant:
      plain    Σ_k (d_k b)^*(d_k g)
      tilde    Σ_k (d_k g)(d_k b)^*
      adjoint  Σ_k (d_k b)(d_k g)
    """
    _check_pair(b, g, "paraproduct dual")
    _, layers = haar_decomposition(b)
    if variant == "plain":
        return _backward(layers, g)
    if variant == "tilde":
        if not isinstance(g, MatrixStepFunction):
            raise ShapeMismatchError("tilde paraproduct acts on matrix-valued functions only")
        return _backward(layers, g, right=True)
    if variant == "adjoint":
        return _backward(layers, g, conj=True)
    raise ParameterError(f"unknown paraproduct variant {variant!r}", extra={"variant": variant})


def make_paraproduct_handle(
    b: MatrixStepFunction, variant: Variant = "plain", kind: Optional[Kind] = None
) -> LinearOperatorHandle:
    """
    Matrix-free handle for π_b, π̃_b or π_{b*}. Inputs are vectors for plain
    and adjoint unless kind="matrix" is asked for; tilde always takes matrices.
    """
    if variant not in VARIANTS:
        raise ParameterError(
            f"unknown paraproduct variant {variant!r}", extra={"variant": variant}
        )
    if kind is None:
        kind = "matrix" if variant == "tilde" else "vector"
    if variant == "tilde" and kind != "matrix":
        raise ParameterError("tilde paraproduct needs matrix-valued inputs")
    _, layers = haar_decomposition(b)
    right = variant == "tilde"
    conj = variant == "adjoint"

    def apply(f: AnyStepFunction) -> AnyStepFunction:
        _check_pair(b, f, variant)
        return _forward(layers, f, right=right, conj=conj)

    def adjoint_apply(g: AnyStepFunction) -> AnyStepFunction:
        _check_pair(b, g, variant)
        return _backward(layers, g, right=right, conj=conj)

    return LinearOperatorHandle(
        name=f"paraproduct/{variant}",
        input_kind=kind,
        n=b.n,
        depth=b.depth,
        apply=apply,
        adjoint_apply=adjoint_apply,
    )


# ---------------------------------------------------------------------------
# Norm estimators
# ---------------------------------------------------------------------------


def paraproduct_l2_norm(
    b: MatrixStepFunction,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    restarts: int = DEFAULT_RESTARTS,
) -> NormEstimate:
    """
    ‖π_b‖ on L²(ℓ²_n) by power iteration. Left multiplication acts column by
    column, so this is also the norm on L²(S²_n).
    """
    handle = make_paraproduct_handle(b, "plain")
    return operator_norm_power(handle, tol=tol, max_iter=max_iter, seed=seed, restarts=restarts)


def _singular_vector_starts(b: MatrixStepFunction) -> List[np.ndarray]:
    """Top left and right singular vectors of the largest coefficient on each level."""
    _, layers = haar_decomposition(b)
    vectors: List[np.ndarray] = []
    for layer in layers:
        if layer.is_zero():
            continue
        U, s, Wh = _svd(layer.coefficients)
        j = int(np.argmax(s[:, 0]))
        vectors.append(np.conj(Wh[j, 0, :]))
        vectors.append(U[j, :, 0])
    return vectors


def lp_norm_lower_bound(
    b: MatrixStepFunction,
    p: float,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    *,
    variant: Variant = "plain",
    iterations: int = DEFAULT_ITERATIONS,
) -> NormEstimate:
    """
    Achieved ratio ‖π_b f‖_{L^p(S^p)} / ‖f‖_{L^p(S^p)} after multi-start ascent
    over matrix-valued f; a certified lower bound for the L^p(S^p) norm.
    """
    if not (1 < p < np.inf):
        raise ParameterError(f"lp_norm_lower_bound needs 1 < p < inf, got {p}", extra={"p": p})
    handle = make_paraproduct_handle(b, variant, kind="matrix")
    template = handle.zeros()
    fixed = [MatrixStepFunction.identity(b.n, b.depth)]
    fixed += constant_starts(template, _singular_vector_starts(b))
    est = ratio_lower_bound(
        handle,
        p,
        seed=seed,
        config=AscentConfig(starts=starts, iterations=iterations),
        fixed_starts=fixed,
    )
    log.debug(
        "lp lower bound",
        extra={"variant": variant, "p": p, "value": est.value, "n": b.n, "K": b.depth},
    )
    return est


# ---------------------------------------------------------------------------
# Tail multipliers L_m, R_m and the John–Nirenberg quantity
# ---------------------------------------------------------------------------


def tail_start(m: int, inclusive: bool = True) -> int:
    """First level k of the tail Σ_k d_k b attached to m."""
    return max(m, 1) if inclusive else m + 1


def multiplier_handle(
    b: MatrixStepFunction,
    m: int,
    side: Side = "left",
    inclusive: bool = True,
) -> LinearOperatorHandle:
    """
    L_m(a) = Σ_{k≥m} d_k b·a (left) or R_m(a) = Σ_{k≥m} a·d_k b (right) on
    F_m-measurable a. The tail equals b − E_{s-1} b with s = tail_start(m).
    """
    if not (0 <= m <= b.depth):
        raise LevelOutOfRangeError(
            f"multiplier level {m} outside [0, {b.depth}]", extra={"m": m, "depth": b.depth}
        )
    if side not in ("left", "right"):
        raise ParameterError(f"unknown multiplier side {side!r}", extra={"side": side})
    tail = (b - conditional_expectation(b, tail_start(m, inclusive) - 1)).values
    tail_ct = _ct(tail)

    def project(a: AnyStepFunction) -> AnyStepFunction:
        return conditional_expectation(a, m)

    def apply(a: AnyStepFunction) -> AnyStepFunction:
        _check_pair(b, a, "multiplier")
        if not is_measurable(a, m, MEASURABILITY_TOL):
            raise MeasurabilityError(
                f"multiplier input is not F_{m}-measurable", extra={"m": m}
            )
        return a.with_values(tail @ a.values if side == "left" else a.values @ tail)

    def adjoint_apply(y: AnyStepFunction) -> AnyStepFunction:
        _check_pair(b, y, "multiplier")
        raw = tail_ct @ y.values if side == "left" else y.values @ tail_ct
        return conditional_expectation(y.with_values(raw), m)

    return LinearOperatorHandle(
        name=f"multiplier/{side}/{m}",
        input_kind="matrix",
        n=b.n,
        depth=b.depth,
        apply=apply,
        adjoint_apply=adjoint_apply,
        project=project,
    )


def jn_profile(
    b: MatrixStepFunction,
    q: float,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    *,
    inclusive: bool = True,
    tol: float = 1e-12,
    max_iter: int = 20000,
) -> List[Tuple[int, Side, float]]:
    """
    (m, side, value) for every level and side. q = 2 uses power iteration on
    the multiplier handles; other q use ascent with the E_m projection.
    """
    if not q >= 1 or np.isinf(q):
        raise ParameterError(f"jn quantity needs 1 <= q < inf, got {q}", extra={"q": q})
    rows: List[Tuple[int, Side, float]] = []
    sides: Tuple[Side, Side] = ("left", "right")
    for m in range(b.depth + 1):
        for offset, side in enumerate(sides):
            handle = multiplier_handle(b, m, side, inclusive)
            if q == 2:
                est = operator_norm_power(handle, tol=tol, max_iter=max_iter, seed=seed)
            else:
                est = ratio_lower_bound(
                    handle,
                    q,
                    seed=seed + 2 * m + offset,
                    config=AscentConfig(starts=starts),
                    fixed_starts=[MatrixStepFunction.identity(b.n, b.depth)],
                )
            rows.append((m, side, est.value))
    return rows


def jn_quantity(
    b: MatrixStepFunction,
    q: float,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    *,
    inclusive: bool = True,
) -> float:
    """
    max over m and both sides of sup ‖tail_m·a‖_q / ‖a‖_q over F_m-measurable a.
    The normalised trace scales numerator and denominator alike.
    """
    if b.depth == 0:
        return 0.0
    rows = jn_profile(b, q, starts, seed, inclusive=inclusive)
    return max(value for _, _, value in rows)


# ---------------------------------------------------------------------------
# L∞ → BMO_cr
# ---------------------------------------------------------------------------


def _bmo_c_subgradient(
    h: MatrixStepFunction, inclusive: bool = True
) -> Tuple[float, np.ndarray]:
    """
    ‖h‖²_{BMO_c} and a gradient of it in value coordinates, taken at the
    maximising level m, atom Q and top eigenvector v:
    φ = mean_Q Σ_{k≥s} ‖(d_k h) v‖², ∇φ = (2/|Q|) Σ_{k≥s} d_k(1_Q·d_k(hv)) ⊗ v^*.
    """
    K = h.depth
    best = (-1.0, 0, 0, np.zeros(h.n, dtype=np.complex128))
    for m, tail in enumerate(tail_expectations(h, inclusive=inclusive)):
        herm = 0.5 * (tail + _ct(tail))
        w, U = np.linalg.eigh(herm)
        idx = int(np.argmax(w[:, -1]))
        if w[idx, -1] > best[0]:
            best = (float(w[idx, -1]), m, idx, U[idx, :, -1])
    value, m, idx, v = best
    grad = np.zeros_like(h.values)
    if value <= 0.0:
        return max(value, 0.0), grad
    span = 2 ** (K - m)
    region = slice(idx * span, (idx + 1) * span)
    w_fn = VectorStepFunction(np.einsum("aij,j->ai", h.values, v))
    g = np.zeros_like(w_fn.values)
    for k in range(tail_start(m, inclusive), K + 1):
        layer = martingale_difference(w_fn, k).expand(K).values
        masked = np.zeros_like(layer)
        masked[region] = layer[region]
        g += martingale_difference(VectorStepFunction(masked), k).expand(K).values
    g *= 2.0 / span
    return value, np.einsum("ai,j->aij", g, np.conj(v))


def _bmo_cr_objective(
    h: MatrixStepFunction, inclusive: bool = True
) -> Tuple[float, np.ndarray]:
    """max(‖h‖²_{BMO_c}, ‖h^*‖²_{BMO_c}) with the gradient of the larger side."""
    col, g_col = _bmo_c_subgradient(h, inclusive)
    row, g_row = _bmo_c_subgradient(h.adjoint(), inclusive)
    if row > col:
        return row, _ct(g_row)
    return col, g_col


def linf_to_bmo_estimate(
    b: MatrixStepFunction,
    variant: Variant = "plain",
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    *,
    iterations: int = DEFAULT_ITERATIONS,
) -> NormEstimate:
    """
    Lower bound of sup{‖π_b f‖_{BMO_cr} : ‖f‖_∞ ≤ 1} by projected subgradient
    ascent; iterates are kept in the unit ball by per-atom spectral clipping.
    """
    handle = make_paraproduct_handle(b, variant, kind="matrix")
    rng = np.random.default_rng(seed)
    shape = (2**b.depth, b.n, b.n)
    initial: List[MatrixStepFunction] = [MatrixStepFunction.identity(b.n, b.depth)]
    for _ in range(starts):
        raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        initial.append(MatrixStepFunction(clip_spectrum(raw, 1.0)))

    def evaluate(f: MatrixStepFunction) -> Tuple[float, np.ndarray]:
        h = handle.apply(f)
        assert isinstance(h, MatrixStepFunction)
        value, g_h = _bmo_cr_objective(h)
        g_f = handle.adjoint_apply(h.with_values(g_h)).values
        return value, g_f

    best_value = -1.0
    best_f = initial[0]
    total_iters = 0
    for idx, f in enumerate(initial):
        value, grad = evaluate(f)
        step = 0.5
        it = 0
        for it in range(1, iterations + 1):
            gnorm = float(np.sqrt(np.vdot(grad, grad).real / f.atoms))
            if gnorm == 0.0 or step < 1e-12:
                break
            improved = False
            for _ in range(30):
                cand = MatrixStepFunction(clip_spectrum(f.values + (step / gnorm) * grad, 1.0))
                cand_value, cand_grad = evaluate(cand)
                if cand_value > value:
                    f, value, grad = cand, cand_value, cand_grad
                    step *= 1.5
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
        total_iters += it
        log.debug("bmo ascent start finished", extra={"start": idx, "value": value})
        if value > best_value:
            best_value, best_f = value, f

    achieved = bmo_cr_norm(handle.apply(best_f))  # type: ignore[arg-type]
    return NormEstimate(
        value=float(achieved),
        method="ascent-lower-bound",
        certification="lower-bound",
        iterations=total_iters,
        witness=best_f,
        notes={"variant": variant, "starts": len(initial), "witness_linf": linf_norm(best_f)},
    )


# ---------------------------------------------------------------------------
# Identities and monitors
# ---------------------------------------------------------------------------


def decomposition_rhs(b: MatrixStepFunction, f: MatrixStepFunction) -> MatrixStepFunction:
    """b^*f − E_0b^*·E_0f − π_{b*}(f) − (π_{f*}(b))^*."""
    _check_pair(b, f, "decomposition")
    bstar = b.adjoint()
    mean_term = atom_means(bstar, 0)[0] @ atom_means(f, 0)[0]
    out = (
        bstar.values @ f.values
        - mean_term[None, :, :]
        - paraproduct_apply(bstar, f).values
        - _ct(paraproduct_apply(f.adjoint(), b).values)
    )
    return MatrixStepFunction(out)


def decomposition_residual(b: MatrixStepFunction, f: MatrixStepFunction) -> float:
    """Max entrywise gap between π_b^†(f) and its product-rule decomposition."""
    lhs = paraproduct_dual_apply(b, f, "plain")
    rhs = decomposition_rhs(b, f)
    return float(np.max(np.abs(lhs.values - rhs.values), initial=0.0))


def regularity_ratio(a: MatrixStepFunction, m: int) -> float:
    """‖a‖_∞ / ‖E_{m-1} a‖_∞ for F_m-measurable a, m ≥ 1."""
    if not (1 <= m <= a.depth):
        raise LevelOutOfRangeError(
            f"regularity needs 1 <= m <= {a.depth}, got {m}", extra={"m": m}
        )
    if not is_measurable(a, m, MEASURABILITY_TOL):
        raise MeasurabilityError(f"regularity input is not F_{m}-measurable", extra={"m": m})
    coarse = linf_norm(conditional_expectation(a, m - 1))  # type: ignore[arg-type]
    if coarse == 0.0:
        return 0.0
    return linf_norm(a) / coarse


def bmo_over_lp_ratio(
    b: MatrixStepFunction, p: float, starts: int = DEFAULT_STARTS, seed: int = 0
) -> Tuple[float, float, float]:
    """
    (‖b‖_{BMO_cr}, max(lower bounds of ‖π_b‖_p, ‖π̃_b‖_p), their ratio).
    Monitored only; no constant is asserted.
    """
    bmo = bmo_cr_norm(b)
    plain = lp_norm_lower_bound(b, p, starts, seed, variant="plain").value
    tilde = lp_norm_lower_bound(b, p, starts, seed, variant="tilde").value
    top = max(plain, tilde)
    ratio = bmo / top if top > 0 else 0.0
    return bmo, top, ratio
