"""
Command-line entry point for the paraproduct lab.

Examples:
  python -m app.cli growth-theorem11 --mode pairing --n 4,16,64,256 --seed 7 --plot
  python -m app.cli prop22-fuzz --samples 200 --nmax 8 --kmax 6 --seed 1
  python -m app.cli norms --input symbol.json --p 4

Exit codes: 0 ok, 1 an asserted invariant failed, 2 usage or input error,
3 budget guard exceeded, 70 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from prometheus_client import write_to_textfile

from adapters.metrics.base import Metrics
from adapters.metrics.noop import NoOpMetrics
from app.cache import ExperimentCache
from app.output import render_table
from app.settings import get_settings
from app.suites import RunContext, run_suite
from paraproducts.errors.codes import ErrorCode
from paraproducts.errors.exceptions import LabError
from paraproducts.errors.mapper import map_error
from paraproducts.prom import REGISTRY

try:
    from dotenv import load_dotenv
except Exception:  # pragma: no cover
    load_dotenv = None  # type: ignore[assignment]

log = logging.getLogger(__name__)


# ------------------------------ parsing ------------------------------ #
def _int_list(raw: str) -> List[int]:
    try:
        values = [int(x) for x in raw.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("n values must be positive integers")
    return values


def _positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def _exponent(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}") from exc
    if not (1.0 < value < float("inf")):
        raise argparse.ArgumentTypeError("exponent must satisfy 1 < exponent < inf")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraproduct-lab",
        description="Matrix-valued dyadic paraproduct experiments",
    )
    parser.add_argument("--log-level", default="WARNING")
    parser.add_argument("--output-dir", default=None, help="defaults to PARAPRODUCT_OUTPUT_DIR")
    parser.add_argument("--metrics-file", default=None, help="write Prometheus text format here")
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--plot", action="store_true", help="write an SVG growth plot")

    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0)
        return p

    p = add("norms", "L∞, BMO and L² norms of a JSON symbol")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, default=None, help="also report L^p lower bounds")

    p = add("growth-theorem11", "paraproduct norm growth for contractive witnesses")
    p.add_argument("--mode", choices=["pairing", "power"], default="pairing")
    p.add_argument("--n", type=_int_list, default=[4, 16, 64, 256])

    p = add("growth-lp", "L^p and L∞→BMO lower bounds for contractive witnesses")
    p.add_argument("--p", type=_exponent, default=4.0)
    p.add_argument("--n", type=_int_list, default=[2, 4, 6])
    p.add_argument("--starts", type=_positive_int, default=8)

    p = add("growth-triangle", "S¹ lower bounds of the triangle projection")
    p.add_argument("--n", type=_int_list, default=[2, 4, 8, 16, 32])
    p.add_argument("--starts", type=_positive_int, default=8)

    p = add("sweep", "BMO_c norm of the sweep of witness symbols")
    p.add_argument("--n", type=_int_list, default=[2, 4, 8])

    for name, help_text, samples, nmax, kmax in (
        ("jn-check", "q=2 multiplier norm vs BMO_cr", 50, 4, 4),
        ("prop22-fuzz", "square function BMO_c bound", 200, 8, 6),
        ("regularity", "regularity constant of the dyadic filtration", 100, 4, 5),
    ):
        p = add(name, help_text)
        p.add_argument("--samples", type=_positive_int, default=samples)
        p.add_argument("--nmax", type=_positive_int, default=nmax)
        p.add_argument("--kmax", type=_positive_int, default=kmax)
        if name == "jn-check":
            p.add_argument("--q", type=_exponent, default=2.0)

    p = add("identity-suite", "exact identities on random data")
    p.add_argument("--instances", type=_positive_int, default=50)

    return parser


# ------------------------------ helpers ------------------------------ #
def _is_pytest() -> bool:
    return bool(os.getenv("PYTEST_CURRENT_TEST"))


def _make_metrics(want_file: bool) -> Metrics:
    # Under pytest, keep metrics side-effect free unless a file is requested.
    if _is_pytest() and not want_file:
        return NoOpMetrics()
    from adapters.metrics.prometheus import PrometheusMetrics

    return PrometheusMetrics()


def main(argv: Optional[List[str]] = None) -> int:
    if load_dotenv is not None:
        load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    settings = get_settings()
    metrics = _make_metrics(bool(args.metrics_file))
    output_dir = Path(args.output_dir or settings.output_dir)
    cache = None if args.no_cache else ExperimentCache(settings.cache_dir, settings.app_version, metrics)
    ctx = RunContext(
        settings=settings,
        numerics=settings.numerics(),
        metrics=metrics,
        output_dir=output_dir,
        cache=cache,
        plot=args.plot,
    )

    name = args.command
    try:
        outcome, files = run_suite(name, args, ctx)
    except LabError as exc:
        status, _ = map_error(exc.code)
        metrics.inc_experiment_run(experiment=name, status="error")
        print(f"error [{exc.code.value}]: {exc.message}", file=sys.stderr)
        for line in exc.details or []:
            print(f"  {line}", file=sys.stderr)
        _flush_metrics(args.metrics_file)
        return status
    except Exception as exc:
        log.exception("unhandled error", extra={"experiment": name})
        status, _ = map_error(ErrorCode.INTERNAL)
        metrics.inc_experiment_run(experiment=name, status="error")
        print(f"error [{ErrorCode.INTERNAL.value}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        _flush_metrics(args.metrics_file)
        return status

    print(render_table(outcome.columns, outcome.rows))
    for path in files:
        print(f"wrote {path}")
    violations = outcome.violations
    if violations:
        print(f"{len(violations)} invariant violation(s):", file=sys.stderr)
        for check in violations[:20]:
            print(f"  {check.name}: value={check.value!r} bound={check.bound!r}", file=sys.stderr)
    else:
        print(f"{len(outcome.checks)} checks passed")
    _flush_metrics(args.metrics_file)
    return 0 if outcome.ok else 1


def _flush_metrics(path: Optional[str]) -> None:
    if path:
        write_to_textfile(path, REGISTRY)


if __name__ == "__main__":
    sys.exit(main())
