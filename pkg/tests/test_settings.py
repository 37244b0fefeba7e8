from pathlib import Path

import pytest

from app.settings import DEFAULT_LAB_CONFIG, NumericsConfig, Settings, get_settings


def test_defaults_without_env(monkeypatch):
    for name in ("PARAPRODUCT_CACHE_DIR", "PARAPRODUCT_OUTPUT_DIR", "PARAPRODUCT_CONFIG"):
        monkeypatch.delenv(name, raising=False)
    s = Settings.from_env()
    assert s.output_dir == "results"
    assert s.power_budget_n == 16
    assert Path(s.config_path) == DEFAULT_LAB_CONFIG


def test_env_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("PARAPRODUCT_POWER_BUDGET_N", "8")
    monkeypatch.setenv("PARAPRODUCT_WORKERS", "0")
    monkeypatch.setenv("APP_VERSION", "1.2.3")
    monkeypatch.setenv("PARAPRODUCT_CONFIG", str(tmp_path / "lab.yaml"))
    get_settings.cache_clear()
    s = get_settings()
    assert s.power_budget_n == 8
    assert s.workers == 1
    assert s.app_version == "1.2.3"
    assert s.cache_dir == str(tmp_path / "cache")
    assert s.config_path == str(tmp_path / "lab.yaml")


def test_bad_integer_falls_back(monkeypatch):
    monkeypatch.setenv("PARAPRODUCT_POWER_BUDGET_N", "many")
    assert Settings.from_env().power_budget_n == 16


def test_shipped_numerics_file_matches_defaults():
    assert NumericsConfig.load(DEFAULT_LAB_CONFIG) == NumericsConfig()


def test_numerics_yaml_overrides(tmp_path):
    cfg = tmp_path / "lab.yaml"
    cfg.write_text(
        "numerics:\n  power_tol: 1.0e-12\n  ascent_starts: 3\n  unknown_key: 1\n",
        encoding="utf-8",
    )
    numerics = NumericsConfig.load(cfg)
    assert numerics.power_tol == pytest.approx(1e-12)
    assert numerics.ascent_starts == 3
    assert numerics.power_restarts == NumericsConfig().power_restarts


def test_missing_numerics_file_gives_defaults(tmp_path):
    assert NumericsConfig.load(tmp_path / "absent.yaml") == NumericsConfig()


def test_bad_numerics_value_is_skipped():
    assert NumericsConfig.from_mapping({"power_max_iter": "lots"}).power_max_iter == 5000
