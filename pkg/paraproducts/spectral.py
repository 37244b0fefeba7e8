"""
Spectral kernels for M_n and a power-iteration norm estimator for
matrix-free linear maps between step-function spaces.

Singular values, Schatten norms and dual unitaries all come from one SVD
kernel. PSD square roots go through eigh of the Hermitian part so the
roundoff clamp acts on signed eigenvalues.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from paraproducts.dyadic import (
    AnyStepFunction,
    Kind,
    MatrixStepFunction,
    VectorStepFunction,
    l2_inner,
)
from paraproducts.errors.exceptions import (
    NonFiniteInputError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    ParameterError,
    SpectralError,
)
from paraproducts.types import NormEstimate

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
PSD_CLAMP = 1e-10

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 5000
DEFAULT_RESTARTS = 3


# ---------------------------------------------------------------------------
# Matrix kernels
# ---------------------------------------------------------------------------


def _as_finite(A: np.ndarray) -> np.ndarray:
    arr = np.asarray(A, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError("matrix has non-finite entries")
    return arr


def _svd(A: np.ndarray, compute_uv: bool = True):
    try:
        return np.linalg.svd(A, full_matrices=False, compute_uv=compute_uv)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"SVD did not converge: {exc}") from exc


def singular_values(A: np.ndarray) -> np.ndarray:
    """Descending singular values; works on stacks (..., n, m) as well."""
    return _svd(_as_finite(A), compute_uv=False)


def schatten_norm(A: np.ndarray, p: float) -> float:
    """(Σ s_i^p)^{1/p}; p = inf is the operator norm, p = 1 the trace norm."""
    return float(schatten_norms(np.asarray(A)[None, ...], p)[0])


def schatten_norms(stack: np.ndarray, p: float) -> np.ndarray:
    """Schatten p-norm of every matrix in a (N, n, m) stack."""
    if not p >= 1:
        raise ParameterError(f"Schatten exponent must be >= 1, got {p}", extra={"p": p})
    s = singular_values(stack)
    if np.isinf(p):
        return s[..., 0] if s.shape[-1] else np.zeros(s.shape[:-1])
    top = s[..., 0] if s.shape[-1] else np.zeros(s.shape[:-1])
    safe = np.where(top > 0, top, 1.0)
    scaled = (s / safe[..., None]) ** p
    return np.where(top > 0, top * scaled.sum(axis=-1) ** (1.0 / p), 0.0)


def spectral_norms(stack: np.ndarray) -> np.ndarray:
    return schatten_norms(stack, np.inf)


def psd_sqrt(A: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix."""
    return psd_sqrt_stack(np.asarray(A)[None, ...])[0]


def psd_sqrt_stack(stack: np.ndarray) -> np.ndarray:
    """
    Pointwise PSD square root of a (N, n, n) stack.

    Eigenvalues down to -PSD_CLAMP·scale are treated as roundoff and clamped
    to 0; anything more negative is rejected.
    """
    arr = _as_finite(stack)
    scale = np.maximum(1.0, np.abs(arr).max(axis=(-2, -1), initial=0.0))
    asym = np.abs(arr - np.conj(np.swapaxes(arr, -1, -2))).max(axis=(-2, -1), initial=0.0)
    if np.any(asym > HERMITIAN_TOL * scale):
        raise NotHermitianError(
            "psd_sqrt input is not Hermitian",
            extra={"max_asymmetry": float(asym.max())},
        )
    herm = 0.5 * (arr + np.conj(np.swapaxes(arr, -1, -2)))
    try:
        w, U = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigh did not converge: {exc}") from exc
    if np.any(w < -PSD_CLAMP * scale[..., None]):
        raise NotPositiveSemidefiniteError(
            "psd_sqrt input has a negative eigenvalue beyond roundoff",
            extra={"min_eigenvalue": float(w.min())},
        )
    root = np.sqrt(np.clip(w, 0.0, None))
    return (U * root[..., None, :]) @ np.conj(np.swapaxes(U, -1, -2))


def _normalize_phases(U: np.ndarray, Wh: np.ndarray) -> None:
    """Make the first non-negligible entry of each left singular vector real positive."""
    for i in range(U.shape[1]):
        col = U[:, i]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size == 0:
            continue
        phase = col[idx[0]] / abs(col[idx[0]])
        U[:, i] = col / phase
        Wh[i, :] = Wh[i, :] * phase


def dual_unitary(M: np.ndarray) -> np.ndarray:
    """
    Unitary V with tr(V·M) = ‖M‖_{S¹}: if M = U Σ W^* then V = W U^*.
    """
    arr = _as_finite(M)
    U, _, Wh = _svd(arr)
    U = U.copy()
    Wh = Wh.copy()
    _normalize_phases(U, Wh)
    return np.conj(Wh.T) @ np.conj(U.T)


def clip_spectrum(stack: np.ndarray, bound: float = 1.0) -> np.ndarray:
    """Per-matrix spectral clipping: singular values above `bound` set to `bound`."""
    U, s, Wh = _svd(_as_finite(stack))
    return (U * np.minimum(s, bound)[..., None, :]) @ Wh


# ---------------------------------------------------------------------------
# Matrix-free operators
# ---------------------------------------------------------------------------

Apply = Callable[[AnyStepFunction], AnyStepFunction]


@dataclass(frozen=True)
class LinearOperatorHandle:
    """
    Matrix-free linear map between step-function spaces.

    `adjoint_apply` realises the L²-adjoint. `project` is the orthogonal
    projection onto the domain (identity unless the domain is a subspace,
    e.g. F_m-measurable functions for the multipliers L_m, R_m).
    """

    name: str
    input_kind: Kind
    n: int
    depth: int
    apply: Apply
    adjoint_apply: Apply
    output_kind: Optional[Kind] = None
    project: Optional[Apply] = None

    def zeros(self) -> AnyStepFunction:
        if self.input_kind == "matrix":
            return MatrixStepFunction.zeros(self.n, self.depth)
        return VectorStepFunction.zeros(self.n, self.depth)

    def output_zeros(self) -> AnyStepFunction:
        if (self.output_kind or self.input_kind) == "matrix":
            return MatrixStepFunction.zeros(self.n, self.depth)
        return VectorStepFunction.zeros(self.n, self.depth)

    def sample(self, rng: np.random.Generator) -> AnyStepFunction:
        """Complex Gaussian element of the domain."""
        shape = self.zeros().values.shape
        raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        x = self.zeros().with_values(raw)
        return self.project(x) if self.project is not None else x

    def output_sample(self, rng: np.random.Generator) -> AnyStepFunction:
        shape = self.output_zeros().values.shape
        raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return self.output_zeros().with_values(raw)

    def adjoint_residual(self, rng: np.random.Generator, trials: int = 20) -> float:
        """Worst relative mismatch of ⟨Ax, y⟩ and ⟨x, A^†y⟩ over random pairs."""
        worst = 0.0
        for _ in range(trials):
            x = self.sample(rng)
            y = self.output_sample(rng)
            lhs = l2_inner(self.apply(x), y)
            rhs = l2_inner(x, self.adjoint_apply(y))
            scale = max(abs(lhs), abs(rhs), 1e-300)
            worst = max(worst, abs(lhs - rhs) / scale)
        return worst


def assemble_dense(handle: LinearOperatorHandle) -> np.ndarray:
    """
    Dense matrix of apply∘project in flattened value coordinates.

    Both spaces carry the same 2^{-K} weight, so singular values of this
    matrix are the operator's singular values. Intended for n ≤ 3, K ≤ 4.
    """
    template = handle.zeros()
    dim = template.values.size
    columns = []
    for i in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[i] = 1.0
        x = template.with_values(e.reshape(template.values.shape))
        if handle.project is not None:
            x = handle.project(x)
        columns.append(handle.apply(x).values.reshape(-1))
    return np.stack(columns, axis=1)


def operator_norm_exact(handle: LinearOperatorHandle) -> NormEstimate:
    dense = assemble_dense(handle)
    s = singular_values(dense)
    value = float(s[0]) if s.size else 0.0
    return NormEstimate(value=value, method="exact-svd", certification="exact")


def _norm(F: AnyStepFunction) -> float:
    return float(np.sqrt(np.vdot(F.values, F.values).real / F.atoms))


def _power_run(
    handle: LinearOperatorHandle,
    rng: np.random.Generator,
    tol: float,
    max_iter: int,
) -> tuple[float, int, float, bool, AnyStepFunction]:
    x = handle.sample(rng)
    x = x * (1.0 / max(_norm(x), 1e-300))
    rho_old = -1.0
    rho = 0.0
    residual = 0.0
    for it in range(1, max_iter + 1):
        y = handle.apply(x)
        rho = _norm(y) ** 2
        if rho == 0.0:
            return 0.0, it, 0.0, True, x
        z = handle.adjoint_apply(y)
        residual = _norm(z - x * rho) / rho
        converged = abs(rho - rho_old) <= tol * rho
        rho_old = rho
        x = z * (1.0 / max(_norm(z), 1e-300))
        if converged:
            # Rayleigh quotient at the returned x, so the value stays certified
            rho = _norm(handle.apply(x)) ** 2
            return rho, it, residual, True, x
    return rho, max_iter, residual, False, x


def operator_norm_power(
    handle: LinearOperatorHandle,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> NormEstimate:
    """
    Largest singular value by power iteration on A^†A from seeded random starts.

    Each restart uses its own Generator seeded by (seed, restart); the result
    is the max over restarts, ties going to the lowest restart index.
    """
    if tol <= 0 or max_iter < 1 or restarts < 1:
        raise ParameterError(
            "power iteration needs tol > 0, max_iter >= 1, restarts >= 1",
            extra={"tol": tol, "max_iter": max_iter, "restarts": restarts},
        )
    best: Optional[tuple[float, int, float, bool, AnyStepFunction]] = None
    total_iters = 0
    all_zero = True
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        run = _power_run(handle, rng, tol, max_iter)
        total_iters += run[1]
        all_zero = all_zero and run[0] == 0.0
        if best is None or run[0] > best[0]:
            best = run
    assert best is not None

    if all_zero:
        return NormEstimate(
            value=0.0,
            method="power-iteration",
            certification="exact",
            iterations=total_iters,
            residual=0.0,
        )

    rho, iters, residual, converged, x = best
    if not converged:
        log.warning(
            "power iteration hit max_iter",
            extra={"operator": handle.name, "max_iter": max_iter, "residual": residual},
        )
    log.debug(
        "power iteration finished",
        extra={"operator": handle.name, "iterations": iters, "value": float(np.sqrt(rho))},
    )
    return NormEstimate(
        value=float(np.sqrt(rho)),
        method="power-iteration",
        certification="lower-bound" if converged else "heuristic",
        iterations=iters,
        residual=float(residual),
        witness=x,
        notes={"restarts": restarts, "total_iterations": total_iters},
    )
