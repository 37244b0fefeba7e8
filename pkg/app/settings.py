from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import yaml  # type: ignore[import-untyped]

log = logging.getLogger(__name__)

# Resolve repo root from this file's location:
# app/settings.py → parent = app/ → parent = repo root
REPO_ROOT = Path(__file__).resolve().parents[1]

DEFAULT_LAB_CONFIG = REPO_ROOT / "configs" / "lab.yaml"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "paraproduct-lab"


@dataclass(frozen=True)
class NumericsConfig:
    """Numerical defaults shared by every subcommand (configs/lab.yaml)."""

    power_tol: float = 1e-9
    power_max_iter: int = 5000
    power_restarts: int = 3
    ascent_starts: int = 8
    ascent_iterations: int = 200
    identity_tol: float = 1e-10
    pairing_tol: float = 1e-8

    @classmethod
    def from_mapping(cls, raw: Dict[str, Any]) -> "NumericsConfig":
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for key, value in raw.items():
            if key not in known:
                log.debug("ignoring unknown numerics key", extra={"key": key})
                continue
            default = getattr(cls, key)
            try:
                kwargs[key] = type(default)(value)
            except (TypeError, ValueError):
                log.warning(
                    "bad numerics value; using default",
                    extra={"key": key, "value": value},
                )
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "NumericsConfig":
        p = Path(path)
        if not p.exists():
            return cls()
        data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        section = data.get("numerics", data) if isinstance(data, dict) else {}
        return cls.from_mapping(section if isinstance(section, dict) else {})


@dataclass
class Settings:
    """
    Centralized lab configuration.

    Does NOT depend on pydantic. Values are loaded from environment
    variables via Settings.from_env().
    """

    # --- Cache ---
    cache_dir: str = str(DEFAULT_CACHE_DIR)

    # --- Outputs ---
    output_dir: str = "results"

    # --- Numerical defaults file ---
    config_path: str = str(DEFAULT_LAB_CONFIG)

    # --- Budget guard for power mode / sweep (K = n) ---
    power_budget_n: int = 16

    # --- Per-n experiment tasks ---
    workers: int = 1

    # --- Artifact version (embedded in cache records) ---
    app_version: str = "dev"

    @classmethod
    def from_env(cls) -> "Settings":
        """
        Build Settings from environment variables with sane fallbacks.

        - PARAPRODUCT_CONFIG can be absolute or relative.
        - Relative paths are resolved against REPO_ROOT.
        """

        def getenv_int(name: str, default: int) -> int:
            raw = os.getenv(name)
            if raw is None or raw.strip() == "":
                return default
            try:
                return int(raw)
            except ValueError:
                return default

        raw_cfg = os.getenv("PARAPRODUCT_CONFIG", "").strip()
        if raw_cfg:
            cfg_candidate = Path(raw_cfg)
            if not cfg_candidate.is_absolute():
                cfg_candidate = REPO_ROOT / raw_cfg
        else:
            cfg_candidate = DEFAULT_LAB_CONFIG

        return cls(
            cache_dir=os.getenv("PARAPRODUCT_CACHE_DIR", "").strip() or cls.cache_dir,
            output_dir=os.getenv("PARAPRODUCT_OUTPUT_DIR", "").strip() or cls.output_dir,
            config_path=str(cfg_candidate),
            power_budget_n=getenv_int("PARAPRODUCT_POWER_BUDGET_N", cls.power_budget_n),
            workers=max(1, getenv_int("PARAPRODUCT_WORKERS", cls.workers)),
            app_version=os.getenv("APP_VERSION", cls.app_version),
        )

    def numerics(self) -> NumericsConfig:
        return NumericsConfig.load(self.config_path)


@lru_cache()
def get_settings() -> Settings:
    return Settings.from_env()
