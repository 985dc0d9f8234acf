"""Shared fixtures."""
import numpy as np
import pytest

from loggas.configuration import Window, make_configuration


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(12345))


@pytest.fixture
def unit_inner():
    return Window(-1.0, 1.0)


@pytest.fixture
def lattice16():
    """16 unit-spaced points in [-8, 8]."""
    return make_configuration(-7.5 + np.arange(16))


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """Environment with outputs under a temporary directory."""
    for key in ("LOGGAS_WORKERS", "LOGGAS_SEED", "LOGGAS_TUPLE_CAP", "LOGGAS_SE_THRESHOLD", "LOGGAS_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("LOGGAS_OUTPUT_DIR", str(tmp_path / "runs"))
    return tmp_path
