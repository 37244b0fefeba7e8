import numpy as np
import pytest

from paraproducts.errors.exceptions import BudgetExceededError, ParameterError
from paraproducts.experiments import (
    identity_suite,
    jn_check,
    lp_growth_checks,
    lp_growth_experiment,
    nondecreasing_checks,
    prop22_fuzz,
    regularity_check,
    sweep_experiment,
    theorem11_checks,
    theorem11_experiment,
)
from paraproducts.extremal import build_witness, witness_matrices
from paraproducts.registry import CHECK_SUITES, GROWTH
from paraproducts.symbol_norms import bmo_cr_norm
from paraproducts.types import GrowthRow


def test_registry_names():
    assert set(GROWTH) == {"growth-theorem11", "growth-lp", "growth-triangle", "sweep"}
    assert set(CHECK_SUITES) == {"prop22-fuzz", "jn-check", "identity-suite", "regularity"}


def test_matrix_witness_agrees_with_full_witness():
    _, _, M, V = witness_matrices(5)
    assert float(np.trace(V @ M).real) == pytest.approx(build_witness(5).pairing_value, rel=1e-10)


# ------------------------------ contractive growth ------------------------------ #
def test_pairing_growth_reproduces_log_rate():
    rows = theorem11_experiment([4, 16, 64, 256], "pairing", seed=7)
    assert [r.n for r in rows] == [4, 16, 64, 256]
    values = [r.value for r in rows]
    assert all(b > a for a, b in zip(values, values[1:]))
    ratios = [r.ratio_to_log for r in rows]
    assert max(ratios) / min(ratios) <= 2.0
    assert all(check.ok for check in theorem11_checks(rows, "pairing"))


def test_pairing_rows_are_sorted_and_deduplicated():
    rows = theorem11_experiment([8, 2, 8], "pairing")
    assert [r.n for r in rows] == [2, 8]
    assert rows[0].value == pytest.approx(0.5)
    assert rows[0].extra["linf"] == pytest.approx(1.0)


def test_power_mode_respects_budget():
    with pytest.raises(BudgetExceededError):
        theorem11_experiment([2, 32], "power", power_budget_n=16)
    with pytest.raises(BudgetExceededError):
        sweep_experiment([4], power_budget_n=2)


def test_growth_rejects_bad_input():
    with pytest.raises(ParameterError):
        theorem11_experiment([4], "guess")  # type: ignore[arg-type]
    with pytest.raises(ParameterError):
        theorem11_experiment([0, 4], "pairing")


@pytest.mark.slow
def test_power_mode_dominates_pairing():
    rows = theorem11_experiment([2, 4, 8], "power", seed=7, tol=1e-12)
    checks = theorem11_checks(rows, "power")
    assert all(check.ok for check in checks), [c for c in checks if not c.ok]
    assert all(r.extra["linf"] <= 1.0 + 1e-10 for r in rows)


def test_power_mode_small():
    rows = theorem11_experiment([2, 3], "power", seed=1, tol=1e-12, workers=2)
    assert [r.n for r in rows] == [2, 3]
    for row in rows:
        assert row.value >= row.extra["pairing"] - 1e-6
        assert row.extra["iterations"] >= 1


def test_sweep_growth():
    rows = sweep_experiment([2, 4, 8], seed=0)
    assert rows[0].value == pytest.approx(0.0, abs=1e-10)
    assert rows[1].value == pytest.approx(0.600289, rel=1e-5)
    assert rows[2].value == pytest.approx(0.820656, rel=1e-5)
    assert all(r.certification == "exact" for r in rows)
    assert all(c.ok for c in nondecreasing_checks(rows, tolerance=0.05))


def test_power_mode_honours_iteration_budget():
    rows = theorem11_experiment([3], "power", seed=0, max_iter=1, restarts=2)
    assert rows[0].certification == "heuristic"
    assert rows[0].extra["iterations"] == 1.0


# ------------------------------ L^p and L∞ → BMO growth ------------------------------ #
def test_lp_growth_two_dimensional_witness_is_exact():
    # n = 2: b = r_1 r_2·V with V unitary, so both norms equal 1
    rows = lp_growth_experiment([2], p=4.0, starts=2, iterations=20)
    row = rows[0]
    assert row.value == pytest.approx(1.0, rel=1e-9)
    assert row.extra["linf_to_bmo"] == pytest.approx(1.0, rel=1e-9)
    assert row.ratio_to_log == pytest.approx(1.0 / np.log(3.0))
    assert all(check.ok for check in lp_growth_checks(rows))


def test_lp_growth_rejects_bad_input():
    with pytest.raises(ParameterError):
        lp_growth_experiment([2], p=1.0)
    with pytest.raises(BudgetExceededError):
        lp_growth_experiment([2, 8], power_budget_n=4)


@pytest.mark.slow
def test_lp_growth_exceeds_two_dimensional_value():
    rows = lp_growth_experiment([2, 4, 6], p=4.0, seed=0)
    assert [r.n for r in rows] == [2, 4, 6]
    assert rows[1].value > 1.1 and rows[2].value > 1.1
    # the identity start is feasible and π_b(I) = b − E_0 b
    for row in rows:
        assert row.extra["linf_to_bmo"] >= bmo_cr_norm(build_witness(row.n).b) - 1e-9


def test_nondecreasing_checks_flag_drops():
    rows = [
        GrowthRow(n=2, value=1.0, ratio_to_log=0.0, method="exact"),
        GrowthRow(n=4, value=0.9, ratio_to_log=0.0, method="exact"),
    ]
    assert not nondecreasing_checks(rows)[0].ok
    assert nondecreasing_checks(rows, tolerance=0.2)[0].ok


# ------------------------------ check suites ------------------------------ #
def test_prop22_fuzz_small():
    outcome = prop22_fuzz(samples=20, nmax=4, kmax=4, seed=1)
    assert outcome.ok
    assert len(outcome.rows) == 20 and outcome.violations == []


@pytest.mark.slow
def test_prop22_fuzz_full():
    assert prop22_fuzz(samples=200, nmax=8, kmax=6, seed=1).ok


def test_jn_check_small():
    outcome = jn_check(samples=5, nmax=3, kmax=3, seed=2)
    assert outcome.ok, outcome.violations


def test_jn_check_reports_other_exponents():
    outcome = jn_check(samples=3, nmax=2, kmax=2, seed=5, q=3.0)
    assert outcome.ok
    assert outcome.columns[-1] == "jn_q"
    assert all(np.isfinite(row["jn_q"]) and row["jn_q"] > 0 for row in outcome.rows)
    with pytest.raises(ParameterError):
        jn_check(samples=1, q=1.0)


@pytest.mark.slow
def test_jn_check_full():
    assert jn_check(samples=50, nmax=4, kmax=4, seed=0).ok


def test_regularity_check():
    outcome = regularity_check(samples=30, seed=4)
    assert outcome.ok
    extremal = [c for c in outcome.checks if c.name == "regular/child-indicator"][0]
    assert extremal.value == pytest.approx(2.0)


def test_identity_suite_small():
    outcome = identity_suite(seed=0, instances=10)
    assert outcome.ok, outcome.violations
    names = {c.name for c in outcome.checks}
    assert {"haar_reconstruction", "parseval", "tensor_identity", "decomposition"} <= names
    assert "adjoint/tilde/matrix" in names and "adjoint/tilde/vector" not in names


def test_outcome_reports_violations():
    outcome = prop22_fuzz(samples=3, seed=0)
    assert outcome.violations == [c for c in outcome.checks if not c.ok]
