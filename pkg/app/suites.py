"""
Subcommand runners. Each runner turns parsed CLI arguments into a parameter
dict (the cache key material) and an ExperimentOutcome; run_suite wires in
the cache, metrics and file outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from adapters.metrics.base import Metrics
from app.cache import ExperimentCache
from app.errors import SymbolDocumentError
from app.output import plot_growth, write_csv
from app.schemas import ExperimentRecord, load_symbol
from app.settings import NumericsConfig, Settings
from paraproducts.experiments import lp_growth_checks, nondecreasing_checks, theorem11_checks
from paraproducts.operators import bmo_over_lp_ratio, paraproduct_l2_norm
from paraproducts.registry import CHECK_SUITES, GROWTH
from paraproducts.symbol_norms import symbol_report
from paraproducts.types import CheckResult, ExperimentOutcome, GrowthRow

log = logging.getLogger(__name__)

GROWTH_COLUMNS = ["n", "lower_bound", "ratio_to_log", "method", "certification"]


@dataclass
class RunContext:
    settings: Settings
    numerics: NumericsConfig
    metrics: Metrics
    output_dir: Path
    cache: Optional[ExperimentCache] = None
    plot: bool = False


Params = Dict[str, Any]
Runner = Callable[[argparse.Namespace, RunContext], ExperimentOutcome]


# ------------------------------ growth ------------------------------ #
def _growth_outcome(
    name: str, rows: List[GrowthRow], checks: List[CheckResult], extra_cols: List[str]
) -> ExperimentOutcome:
    return ExperimentOutcome(
        name=name,
        columns=GROWTH_COLUMNS + extra_cols,
        rows=[r.as_dict() for r in rows],
        checks=checks,
    )


def _theorem11(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    rows = GROWTH["growth-theorem11"](
        args.n,
        args.mode,
        args.seed,
        power_budget_n=ctx.settings.power_budget_n,
        tol=ctx.numerics.power_tol,
        max_iter=ctx.numerics.power_max_iter,
        restarts=ctx.numerics.power_restarts,
        workers=ctx.settings.workers,
    )
    for row in rows:
        if "iterations" in row.extra:
            ctx.metrics.inc_power_iterations(
                certification=row.certification, count=int(row.extra["iterations"])
            )
    extra = ["pairing", "linf"] + (["iterations"] if args.mode == "power" else [])
    return _growth_outcome("growth-theorem11", rows, theorem11_checks(rows, args.mode), extra)


def _lp_growth(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    rows = GROWTH["growth-lp"](
        args.n,
        args.p,
        args.seed,
        starts=args.starts,
        iterations=ctx.numerics.ascent_iterations,
        power_budget_n=ctx.settings.power_budget_n,
        workers=ctx.settings.workers,
    )
    extra = ["p", "pairing", "linf", "linf_to_bmo", "linf_to_bmo_ratio_to_log"]
    return _growth_outcome("growth-lp", rows, lp_growth_checks(rows), extra)


def _triangle(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    rows = GROWTH["growth-triangle"](
        args.n, args.starts, args.seed, iterations=ctx.numerics.ascent_iterations
    )
    checks = nondecreasing_checks(rows)
    return _growth_outcome("growth-triangle", rows, checks, [])


def _sweep(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    rows = GROWTH["sweep"](
        args.n,
        args.seed,
        power_budget_n=ctx.settings.power_budget_n,
        workers=ctx.settings.workers,
    )
    checks = nondecreasing_checks(rows, tolerance=0.05)
    return _growth_outcome("sweep", rows, checks, ["bmo_c_symbol"])


# ------------------------------ suites ------------------------------ #
def _prop22(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    return CHECK_SUITES["prop22-fuzz"](args.samples, args.nmax, args.kmax, args.seed)


def _jn(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    return CHECK_SUITES["jn-check"](
        args.samples, args.nmax, args.kmax, args.seed, q=args.q
    )


def _identity(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    return CHECK_SUITES["identity-suite"](
        args.seed,
        args.instances,
        identity_tol=ctx.numerics.identity_tol,
        pairing_tol=ctx.numerics.pairing_tol,
    )


def _regularity(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    return CHECK_SUITES["regularity"](args.samples, args.nmax, args.kmax, args.seed)


def _norms(args: argparse.Namespace, ctx: RunContext) -> ExperimentOutcome:
    b = load_symbol(args.input)
    row: Dict[str, Any] = dict(symbol_report(b).as_dict())
    est = paraproduct_l2_norm(
        b,
        tol=ctx.numerics.power_tol,
        seed=args.seed,
        max_iter=ctx.numerics.power_max_iter,
        restarts=ctx.numerics.power_restarts,
    )
    ctx.metrics.inc_power_iterations(certification=est.certification, count=est.iterations)
    row["l2_norm"] = est.value
    row["l2_certification"] = est.certification
    columns = ["n", "K", "linf", "bmo_c", "bmo_r", "bmo_cr", "l2_norm", "l2_certification"]
    if args.p is not None:
        bmo, lp_max, ratio = bmo_over_lp_ratio(b, args.p, ctx.numerics.ascent_starts, args.seed)
        row.update({"p": args.p, "lp_lower_bound": lp_max, "bmo_over_lp": ratio})
        columns += ["p", "lp_lower_bound", "bmo_over_lp"]
    return ExperimentOutcome(name="norms", columns=columns, rows=[row], checks=[])


RUNNERS: Dict[str, Runner] = {
    "norms": _norms,
    "growth-theorem11": _theorem11,
    "growth-lp": _lp_growth,
    "growth-triangle": _triangle,
    "sweep": _sweep,
    "jn-check": _jn,
    "prop22-fuzz": _prop22,
    "identity-suite": _identity,
    "regularity": _regularity,
}

PLOTTED = {"growth-theorem11", "growth-lp", "growth-triangle", "sweep"}


# ------------------------------ plumbing ------------------------------ #
def parameters_for(name: str, args: argparse.Namespace, ctx: RunContext) -> Params:
    """JSON-native cache key material: every flag that changes the numbers."""
    params: Params = {
        k: v for k, v in sorted(vars(args).items()) if k not in {"command", "func"}
        and k not in {"log_level", "metrics_file", "output_dir", "no_cache", "plot"}
    }
    if isinstance(params.get("n"), (list, tuple)):
        params["n"] = sorted(set(int(x) for x in params["n"]))
    if name == "norms":
        src = Path(args.input)
        if not src.is_file():
            raise SymbolDocumentError(f"symbol file not found: {src}")
        params["input"] = hashlib.sha256(src.read_bytes()).hexdigest()
    params["numerics"] = asdict(ctx.numerics)
    params["power_budget_n"] = ctx.settings.power_budget_n
    return params


def _plain(value: Any) -> Any:
    """numpy scalars → Python scalars, recursively through dicts and lists."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _outcome_to_outputs(outcome: ExperimentOutcome) -> Dict[str, Any]:
    return _plain(
        {
            "columns": outcome.columns,
            "rows": outcome.rows,
            "checks": [asdict(c) for c in outcome.checks],
        }
    )


def _outcome_from_record(name: str, record: ExperimentRecord) -> ExperimentOutcome:
    out = record.outputs
    return ExperimentOutcome(
        name=name,
        columns=list(out["columns"]),
        rows=list(out["rows"]),
        checks=[CheckResult(**c) for c in out["checks"]],
    )


def run_suite(
    name: str, args: argparse.Namespace, ctx: RunContext
) -> Tuple[ExperimentOutcome, List[Path]]:
    """Run (or fetch from cache) one subcommand and write its files."""
    runner = RUNNERS[name]
    params = parameters_for(name, args, ctx)
    cached = ctx.cache.get(name, params) if ctx.cache is not None else None

    t0 = time.perf_counter()
    if cached is not None:
        outcome = _outcome_from_record(name, cached)
        log.info("cache hit", extra={"experiment": name, "key": cached.cache_key})
    else:
        outcome = runner(args, ctx)
        elapsed = time.perf_counter() - t0
        if ctx.cache is not None:
            ctx.cache.put(
                ExperimentRecord(
                    experiment=name,
                    parameters=params,
                    outputs=_outcome_to_outputs(outcome),
                    wall_time_s=elapsed,
                    version=ctx.settings.app_version,
                )
            )
    ctx.metrics.observe_experiment_duration(
        experiment=name, seconds=time.perf_counter() - t0
    )
    for check in outcome.checks:
        ctx.metrics.inc_invariant_check(check=name, ok=check.ok)
    ctx.metrics.inc_experiment_run(
        experiment=name, status="ok" if outcome.ok else "violation"
    )

    files = [write_csv(ctx.output_dir / f"{name}.csv", outcome.columns, outcome.rows)]
    if ctx.plot and name in PLOTTED:
        series = {name: [(float(r["n"]), float(r["lower_bound"])) for r in outcome.rows]}
        files.append(plot_growth(ctx.output_dir / f"{name}.svg", series, title=name))
    return outcome, files
