"""
Experiment runners: growth tables for the contractive witnesses, the sweep
blow-up, and the fuzzed / exact identities. Each runner is deterministic
given its seed; per-n tasks may run on a thread pool but rows always come
back ordered by n.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Literal, Sequence, TypeVar

import numpy as np

from paraproducts.dyadic import (
    DyadicAtom,
    MatrixStepFunction,
    haar_decomposition,
    indicator,
    l2_norm,
    reconstruct,
)
from paraproducts.ascent import DEFAULT_ITERATIONS, DEFAULT_STARTS
from paraproducts.errors.exceptions import BudgetExceededError, ParameterError
from paraproducts.extremal import (
    build_witness,
    pairing_decomposition,
    tensor_identity_check,
    witness_matrices,
)
from paraproducts.operators import (
    VARIANTS,
    decomposition_residual,
    jn_quantity,
    linf_to_bmo_estimate,
    lp_norm_lower_bound,
    make_paraproduct_handle,
    paraproduct_l2_norm,
    regularity_ratio,
)
from paraproducts.random_symbols import (
    random_matrix_function,
    random_psd_measurable,
    random_symbol,
    random_unit_vector,
)
from paraproducts.spectral import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, DEFAULT_TOL
from paraproducts.symbol_norms import (
    bmo_c_norm,
    bmo_cr_norm,
    linf_norm,
    square_function,
    sweep,
)
from paraproducts.types import CheckResult, ExperimentOutcome, GrowthRow

log = logging.getLogger(__name__)

Mode = Literal["pairing", "power"]

DEFAULT_POWER_BUDGET_N = 16
SQRT2 = float(np.sqrt(2.0))

_T = TypeVar("_T")
_R = TypeVar("_R")


# ------------------------------ helpers ------------------------------ #
def _ordered_map(fn: Callable[[_T], _R], items: Sequence[_T], workers: int) -> List[_R]:
    """map() on a thread pool when workers > 1; results keep input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sorted_ns(n_list: Iterable[int]) -> List[int]:
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 1:
        raise ParameterError("n values must be positive integers", extra={"n_list": ns})
    return ns


def _guard(ns: Sequence[int], budget: int, what: str) -> None:
    too_big = [n for n in ns if n > budget]
    if too_big:
        raise BudgetExceededError(
            f"{what} needs n <= {budget}; got {too_big}",
            extra={"budget": budget, "n": too_big},
        )


def _log_ratio(value: float, n: int) -> float:
    return value / float(np.log(n + 1))


# ------------------------------ growth ------------------------------ #
def theorem11_experiment(
    n_list: Iterable[int],
    mode: Mode = "pairing",
    seed: int = 0,
    *,
    power_budget_n: int = DEFAULT_POWER_BUDGET_N,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    restarts: int = DEFAULT_RESTARTS,
    workers: int = 1,
) -> List[GrowthRow]:
    """
    Lower bounds of ‖π_b‖ over contractive symbols: the witness pairing
    ‖T(α⊗β)‖_{S¹} (pairing mode) or power iteration on π_b for the witness b.
    """
    if mode not in ("pairing", "power"):
        raise ParameterError(f"unknown growth mode {mode!r}", extra={"mode": mode})
    ns = _sorted_ns(n_list)
    if mode == "power":
        _guard(ns, power_budget_n, "power mode")

    def task(n: int) -> GrowthRow:
        if mode == "pairing":
            # b = D·V·D with D a diagonal sign matrix on every atom: ‖b‖_∞ = ‖V‖
            _, _, M, V = witness_matrices(n)
            pairing = float(np.trace(V @ M).real)
            return GrowthRow(
                n=n,
                value=pairing,
                ratio_to_log=_log_ratio(pairing, n),
                method="pairing-lower-bound",
                extra={"pairing": pairing, "linf": float(np.linalg.norm(V, 2))},
            )
        bundle = build_witness(n)
        extra = {"pairing": bundle.pairing_value, "linf": linf_norm(bundle.b)}
        est = paraproduct_l2_norm(
            bundle.b, tol=tol, seed=seed, max_iter=max_iter, restarts=restarts
        )
        extra["iterations"] = float(est.iterations)
        return GrowthRow(
            n=n,
            value=est.value,
            ratio_to_log=_log_ratio(est.value, n),
            method=est.method,
            certification=est.certification,
            extra=extra,
        )

    rows = _ordered_map(task, ns, workers)
    log.info("theorem11 growth", extra={"mode": mode, "n": ns})
    return rows


def sweep_experiment(
    n_list: Iterable[int],
    seed: int = 0,
    *,
    power_budget_n: int = DEFAULT_POWER_BUDGET_N,
    workers: int = 1,
) -> List[GrowthRow]:
    """‖S²(b)‖_{BMO_c} for the witness symbols b."""
    ns = _sorted_ns(n_list)
    _guard(ns, power_budget_n, "sweep")

    def task(n: int) -> GrowthRow:
        b = build_witness(n).b
        value = bmo_c_norm(sweep(b))
        return GrowthRow(
            n=n,
            value=value,
            ratio_to_log=_log_ratio(value, n),
            method="exact",
            certification="exact",
            extra={"bmo_c_symbol": bmo_c_norm(b)},
        )

    return _ordered_map(task, ns, workers)


def lp_growth_experiment(
    n_list: Iterable[int],
    p: float = 4.0,
    seed: int = 0,
    *,
    starts: int = DEFAULT_STARTS,
    iterations: int = DEFAULT_ITERATIONS,
    power_budget_n: int = DEFAULT_POWER_BUDGET_N,
    workers: int = 1,
) -> List[GrowthRow]:
    """
    Ascent lower bounds of ‖π_b‖ on L^p(S^p) and of ‖π_b‖_{L∞→BMO_cr} for the
    contractive witnesses b. Both are monitored against log(n+1); neither
    column carries an asserted growth law.
    """
    if not (1 < p < np.inf):
        raise ParameterError(f"growth-lp needs 1 < p < inf, got {p}", extra={"p": p})
    ns = _sorted_ns(n_list)
    _guard(ns, power_budget_n, "growth-lp")

    def task(n: int) -> GrowthRow:
        bundle = build_witness(n)
        lp = lp_norm_lower_bound(bundle.b, p, starts, seed, iterations=iterations)
        bmo = linf_to_bmo_estimate(bundle.b, "plain", starts, seed, iterations=iterations)
        return GrowthRow(
            n=n,
            value=lp.value,
            ratio_to_log=_log_ratio(lp.value, n),
            method=lp.method,
            certification=lp.certification,
            extra={
                "p": float(p),
                "pairing": bundle.pairing_value,
                "linf": linf_norm(bundle.b),
                "linf_to_bmo": bmo.value,
                "linf_to_bmo_ratio_to_log": _log_ratio(bmo.value, n),
            },
        )

    rows = _ordered_map(task, ns, workers)
    log.info("lp growth", extra={"p": p, "n": ns})
    return rows


def lp_growth_checks(rows: Sequence[GrowthRow]) -> List[CheckResult]:
    """Only contractivity of the witnesses is asserted; the bounds themselves are reported."""
    return [
        CheckResult(
            name=f"contractive/{row.n}",
            ok=row.extra.get("linf", 0.0) <= 1.0 + 1e-10,
            value=row.extra.get("linf", 0.0),
            bound=1.0 + 1e-10,
        )
        for row in rows
    ]


def theorem11_checks(
rows: Sequence[GrowthRow], mode: Mode) -> List[CheckResult]:
    checks: List[CheckResult] = []
    for row in rows:
        checks.append(
            CheckResult(
                name=f"contractive/{row.n}",
                ok=row.extra.get("linf", 0.0) <= 1.0 + 1e-10,
                value=row.extra.get("linf", 0.0),
                bound=1.0 + 1e-10,
            )
        )
        if mode == "power":
            pairing = row.extra.get("pairing", 0.0)
            checks.append(
                CheckResult(
                    name=f"power_dominates_pairing/{row.n}",
                    ok=row.value >= pairing - 1e-6,
                    value=row.value,
                    bound=pairing - 1e-6,
                )
            )
    if mode == "pairing":
        for prev, cur in zip(rows, rows[1:]):
            checks.append(
                CheckResult(
                    name=f"increasing/{prev.n}->{cur.n}",
                    ok=cur.value > prev.value,
                    value=cur.value,
                    bound=prev.value,
                )
            )
    return checks


def nondecreasing_checks(
    rows: Sequence[GrowthRow], tolerance: float = 0.0, prefix: str = "nondecreasing"
) -> List[CheckResult]:
    """cur ≥ (1 − tolerance)·prev for consecutive rows."""
    checks = []
    for prev, cur in zip(rows, rows[1:]):
        bound = (1.0 - tolerance) * prev.value
        checks.append(
            CheckResult(
                name=f"{prefix}/{prev.n}->{cur.n}",
                ok=cur.value >= bound - 1e-12,
                value=cur.value,
                bound=bound,
            )
        )
    return checks


# ------------------------------ fuzz suites ------------------------------ #
def _random_shape(rng: np.random.Generator, nmax: int, kmax: int) -> tuple[int, int]:
    return int(rng.integers(1, nmax + 1)), int(rng.integers(1, kmax + 1))


def prop22_fuzz(
    samples: int = 200, nmax: int = 8, kmax: int = 6, seed: int = 0
) -> ExperimentOutcome:
    """‖S(b)‖_{BMO_c} ≤ √2‖b‖_{BMO_c} on random symbols."""
    rng = np.random.default_rng(seed)
    rows = []
    checks = []
    for i in range(samples):
        n, K = _random_shape(rng, nmax, kmax)
        b = random_symbol(rng, n, K)
        lhs = bmo_c_norm(square_function(b))
        rhs = bmo_c_norm(b)
        bound = SQRT2 * rhs + 1e-8
        rows.append({"sample": i, "n": n, "K": K, "bmo_c_square": lhs, "bmo_c": rhs})
        checks.append(CheckResult(name=f"sqrt2/{i}", ok=lhs <= bound, value=lhs, bound=bound))
    return ExperimentOutcome(
        name="prop22-fuzz",
        columns=["sample", "n", "K", "bmo_c_square", "bmo_c"],
        rows=rows,
        checks=checks,
    )


def jn_check(
    samples: int = 50,
    nmax: int = 4,
    kmax: int = 4,
    seed: int = 0,
    *,
    q: float = 2.0,
    rel_tol: float = 1e-6,
) -> ExperimentOutcome:
    """
    jn_quantity(b, 2) against ‖b‖_{BMO_cr} on random symbols.
    With q ≠ 2 the q-multiplier quantity is added as an unchecked `jn_q` column.
    """
    if not (1.0 < q < float("inf")):
        raise ParameterError(f"jn-check needs 1 < q < inf, got {q}", extra={"q": q})
    rng = np.random.default_rng(seed)
    columns = ["sample", "n", "K", "jn", "bmo_cr"]
    if q != 2.0:
        columns.append("jn_q")
    rows = []
    checks = []
    for i in range(samples):
        n, K = _random_shape(rng, nmax, kmax)
        b = random_symbol(rng, n, K)
        jn = jn_quantity(b, 2, seed=seed + i)
        bmo = bmo_cr_norm(b)
        gap = abs(jn - bmo) / max(bmo, 1e-300)
        row: Dict[str, Any] = {"sample": i, "n": n, "K": K, "jn": jn, "bmo_cr": bmo}
        if q != 2.0:
            row["jn_q"] = jn_quantity(b, q, seed=seed + i)
        rows.append(row)
        checks.append(CheckResult(name=f"jn2/{i}", ok=gap <= rel_tol, value=gap, bound=rel_tol))
    return ExperimentOutcome(name="jn-check", columns=columns, rows=rows, checks=checks)


def child_indicator(n: int, depth: int, m: int) -> MatrixStepFunction:
    """1_Q ⊗ I_n for the left-most level-m atom Q: an F_m-measurable PSD function."""
    return indicator(DyadicAtom(m, 0), n, depth)


def regularity_check(
    samples: int = 100, nmax: int = 4, kmax: int = 5, seed: int = 0
) -> ExperimentOutcome:
    """‖a‖_∞ ≤ 2‖E_{m-1}a‖_∞ for PSD F_m-measurable a; the child indicator attains 2."""
    rng = np.random.default_rng(seed)
    rows = []
    checks = []
    for i in range(samples):
        n, K = _random_shape(rng, nmax, kmax)
        m = int(rng.integers(1, K + 1))
        ratio = regularity_ratio(random_psd_measurable(rng, n, K, m), m)
        rows.append({"sample": i, "n": n, "K": K, "m": m, "ratio": ratio})
        checks.append(CheckResult(name=f"regular/{i}", ok=ratio <= 2.0 + 1e-12, value=ratio, bound=2.0))
    extremal = regularity_ratio(child_indicator(2, 3, 2), 2)
    checks.append(
        CheckResult(
            name="regular/child-indicator",
            ok=extremal >= 2.0 - 1e-10,
            value=extremal,
            bound=2.0 - 1e-10,
        )
    )
    return ExperimentOutcome(
        name="regularity",
        columns=["sample", "n", "K", "m", "ratio"],
        rows=rows,
        checks=checks,
    )


def identity_suite(
    seed: int = 0,
    instances: int = 50,
    *,
    identity_tol: float = 1e-10,
    pairing_tol: float = 1e-8,
) -> ExperimentOutcome:
    """
    Exact identities: Haar reconstruction, Parseval, the martingale tensor
    identity, the product-rule decomposition of π_b^†, total = I + II with
    I ≤ ‖b‖²_{BMO_c}‖f‖², and adjointness of every handle.
    """
    rng = np.random.default_rng(seed)
    checks: List[CheckResult] = []

    def record(name: str, value: float, bound: float) -> None:
        checks.append(CheckResult(name=name, ok=value <= bound, value=value, bound=bound))

    worst_rec = worst_parseval = 0.0
    for _ in range(10):
        n, K = _random_shape(rng, 4, 6)
        F = random_matrix_function(rng, n, K)
        mean, layers = haar_decomposition(F)
        back = reconstruct(mean, layers, K, "matrix")
        worst_rec = max(worst_rec, float(np.max(np.abs(back.values - F.values))))
        energy = float(np.vdot(mean, mean).real)
        energy += sum(l2_norm(layer.expand(K)) ** 2 for layer in layers)
        worst_parseval = max(worst_parseval, abs(energy - l2_norm(F) ** 2) / l2_norm(F) ** 2)
    record("haar_reconstruction", worst_rec, 1e-12)
    record("parseval", worst_parseval, 1e-12)

    worst_tensor = 0.0
    for _ in range(instances):
        n = int(rng.integers(1, 9))
        worst_tensor = max(
            worst_tensor,
            tensor_identity_check(n, random_unit_vector(rng, n), random_unit_vector(rng, n)),
        )
    record("tensor_identity", worst_tensor, identity_tol)

    worst_dec = 0.0
    for _ in range(10):
        n, K = _random_shape(rng, 6, 5)
        b = random_symbol(rng, n, K)
        f = random_matrix_function(rng, n, K)
        scale = max(1.0, linf_norm(b) * linf_norm(f))
        worst_dec = max(worst_dec, decomposition_residual(b, f) / scale)
    record("decomposition", worst_dec, identity_tol)

    for idx, b in enumerate([build_witness(4).b, random_symbol(rng, 3, 4)]):
        f = random_matrix_function(rng, b.n, b.depth)
        part_one, part_two, total = pairing_decomposition(b, f)
        gap = abs(total - (part_one + part_two)) / max(abs(total), 1e-300)
        record(f"pairing_split/{idx}", gap, pairing_tol)
        cap = bmo_c_norm(b) ** 2 * l2_norm(f) ** 2 + pairing_tol
        checks.append(
            CheckResult(name=f"pairing_bmo_cap/{idx}", ok=part_one <= cap, value=part_one, bound=cap)
        )

    b = random_symbol(rng, 3, 4)
    for variant in VARIANTS:
        for kind in ("vector", "matrix"):
            if variant == "tilde" and kind == "vector":
                continue
            handle = make_paraproduct_handle(b, variant, kind)  # type: ignore[arg-type]
            record(f"adjoint/{variant}/{kind}", handle.adjoint_residual(rng), identity_tol)

    return ExperimentOutcome(
        name="identity-suite",
        columns=["check", "ok", "value", "bound"],
        rows=[
            {"check": c.name, "ok": int(c.ok), "value": c.value, "bound": c.bound}
            for c in checks
        ],
        checks=checks,
    )
