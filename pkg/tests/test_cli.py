import csv

import numpy as np
import pytest

from app.cli import main
from app.schemas import SymbolDocument
from paraproducts.dyadic import MatrixStepFunction


def read_rows(path):
    with path.open(encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_symbol(path, F: MatrixStepFunction):
    path.write_text(SymbolDocument.from_step_function(F).model_dump_json(), encoding="utf-8")
    return path


def test_growth_pairing_writes_csv(temp_cwd, capsys):
    out = temp_cwd / "out"
    code = main(["--output-dir", str(out), "growth-theorem11", "--mode", "pairing", "--n", "4,16", "--seed", "7"])
    assert code == 0
    rows = read_rows(out / "growth-theorem11.csv")
    assert [r["n"] for r in rows] == ["4", "16"]
    assert {"n", "lower_bound", "ratio_to_log", "pairing", "linf"} <= set(rows[0])
    assert float(rows[1]["lower_bound"]) > float(rows[0]["lower_bound"])
    assert "checks passed" in capsys.readouterr().out


def test_same_seed_gives_identical_bytes(temp_cwd):
    args = ["growth-triangle", "--n", "2,4", "--starts", "2", "--seed", "3"]
    assert main(["--no-cache", "--output-dir", "a", *args]) == 0
    assert main(["--no-cache", "--output-dir", "b", *args]) == 0
    first = (temp_cwd / "a" / "growth-triangle.csv").read_bytes()
    assert first == (temp_cwd / "b" / "growth-triangle.csv").read_bytes()


def test_cached_rerun_reproduces_table(temp_cwd, tmp_path):
    args = ["sweep", "--n", "2,3"]
    assert main(["--output-dir", "first", *args]) == 0
    assert list((tmp_path / "cache").glob("*.json"))
    assert main(["--output-dir", "second", *args]) == 0
    first = (temp_cwd / "first" / "sweep.csv").read_bytes()
    assert first == (temp_cwd / "second" / "sweep.csv").read_bytes()


def test_plot_flag_writes_svg(temp_cwd):
    code = main(["--plot", "--output-dir", "out", "growth-theorem11", "--n", "2,4,8"])
    assert code == 0
    svg = (temp_cwd / "out" / "growth-theorem11.svg").read_text(encoding="utf-8")
    assert svg.lstrip().startswith("<?xml")


def test_power_budget_exit_code(temp_cwd, capsys, monkeypatch):
    monkeypatch.setenv("PARAPRODUCT_POWER_BUDGET_N", "4")
    code = main(["growth-theorem11", "--mode", "power", "--n", "2,8"])
    assert code == 3
    assert "BUDGET_EXCEEDED" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(temp_cwd):
    with pytest.raises(SystemExit) as exc:
        main(["prop22-fuzz", "--bogus"])
    assert exc.value.code == 2


def test_bad_n_list_is_usage_error(temp_cwd):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--n", "2,x"])
    assert exc.value.code == 2


def test_norms_of_constant_symbol(temp_cwd):
    A = np.array([[1.0, 1.0j], [0.0, 2.0]])
    path = write_symbol(temp_cwd / "b.json", MatrixStepFunction.constant(A, 2))
    assert main(["--output-dir", "out", "norms", "--input", str(path)]) == 0
    row = read_rows(temp_cwd / "out" / "norms.csv")[0]
    assert float(row["bmo_c"]) == 0.0 and float(row["bmo_cr"]) == 0.0
    assert float(row["l2_norm"]) == 0.0
    assert float(row["linf"]) == pytest.approx(np.linalg.norm(A, 2))


def test_norms_with_lp_columns(temp_cwd):
    values = np.zeros((2, 1, 1))
    values[:, 0, 0] = [1.0, -1.0]
    path = write_symbol(temp_cwd / "r1.json", MatrixStepFunction(values))
    assert main(["--output-dir", "out", "norms", "--input", str(path), "--p", "3"]) == 0
    row = read_rows(temp_cwd / "out" / "norms.csv")[0]
    assert float(row["lp_lower_bound"]) == pytest.approx(1.0, rel=1e-8)
    assert float(row["bmo_over_lp"]) == pytest.approx(1.0, rel=1e-8)


def test_norms_rejects_missing_and_invalid_files(temp_cwd, capsys):
    assert main(["norms", "--input", "absent.json"]) == 2
    bad = temp_cwd / "bad.json"
    bad.write_text('{"n": 2, "depth": 1, "values": [[[1, 0]]]}', encoding="utf-8")
    assert main(["norms", "--input", str(bad)]) == 2
    assert "INVALID_INPUT" in capsys.readouterr().err


def test_prop22_fuzz_exit_zero(temp_cwd):
    assert main(["--output-dir", "out", "prop22-fuzz", "--samples", "10", "--nmax", "3", "--kmax", "3", "--seed", "1"]) == 0
    assert len(read_rows(temp_cwd / "out" / "prop22-fuzz.csv")) == 10


def test_metrics_file_is_written(temp_cwd):
    target = temp_cwd / "metrics.prom"
    code = main(["--metrics-file", str(target), "--output-dir", "out", "regularity", "--samples", "5"])
    assert code == 0
    text = target.read_text(encoding="utf-8")
    assert "experiment_runs_total" in text
    assert "invariant_checks_total" in text


def test_undecodable_symbol_file_is_input_error(temp_cwd, capsys):
    bad = temp_cwd / "binary.json"
    bad.write_bytes(b'{"n": 1, "depth": 0, "values": [\xff]}')
    assert main(["norms", "--input", str(bad)]) == 2
    assert "INVALID_INPUT" in capsys.readouterr().err


def test_unexpected_failure_exits_internal(temp_cwd, capsys):
    (temp_cwd / "blocker").write_text("not a directory", encoding="utf-8")
    code = main(["--no-cache", "--output-dir", "blocker/out", "growth-theorem11", "--n", "2"])
    assert code == 70
    assert "INTERNAL" in capsys.readouterr().err


def test_growth_lp_writes_both_bounds(temp_cwd):
    code = main(["--output-dir", "out", "growth-lp", "--n", "2", "--p", "3", "--starts", "1"])
    assert code == 0
    row = read_rows(temp_cwd / "out" / "growth-lp.csv")[0]
    assert float(row["lower_bound"]) == pytest.approx(1.0, rel=1e-9)
    assert float(row["linf_to_bmo"]) == pytest.approx(1.0, rel=1e-9)
    assert float(row["p"]) == 3.0


def test_growth_lp_rejects_exponent_one(temp_cwd):
    with pytest.raises(SystemExit) as exc:
        main(["growth-lp", "--p", "1"])
    assert exc.value.code == 2


def test_jn_check_accepts_other_exponent(temp_cwd):
    code = main(
        ["--output-dir", "out", "jn-check", "--samples", "2", "--nmax", "2", "--kmax", "2", "--q", "3"]
    )
    assert code == 0
    rows = read_rows(temp_cwd / "out" / "jn-check.csv")
    assert len(rows) == 2
    assert all(float(r["jn_q"]) > 0 for r in rows)
