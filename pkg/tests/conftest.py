import numpy as np
import pytest

from app.settings import get_settings
from paraproducts.dyadic import MatrixStepFunction, rademacher


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance runs that take minutes")


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20240607)


@pytest.fixture
def temp_cwd(tmp_path, monkeypatch):
    """Run the test inside an isolated temporary working directory."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture(autouse=True)
def isolated_lab_env(tmp_path, monkeypatch):
    """Keep cache and outputs inside tmp_path and rebuild settings per test."""
    monkeypatch.setenv("PARAPRODUCT_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("PARAPRODUCT_OUTPUT_DIR", str(tmp_path / "results"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def first_level_symbol(A, depth: int) -> MatrixStepFunction:
    """b = r_1·A at the given depth."""
    return MatrixStepFunction.from_scalar(rademacher(1, depth), np.asarray(A))
