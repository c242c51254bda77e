"""Shared test fixtures for dickesim tests."""

from pathlib import Path

import numpy as np
import pytest

from dickesim.experiment.measure import exact_histogram, standard_settings
from dickesim.quantum.states import dicke
from dickesim.types import CountHistogram, PureState


@pytest.fixture
def d63() -> PureState:
    return dicke((6, 3))


@pytest.fixture
def exact_d63_histograms(d63: PureState) -> list[CountHistogram]:
    """Infinite-statistics z, x and y histograms of the ideal state."""
    return [exact_histogram(d63, setting, expected_total=1000.0) for setting in standard_settings(6)]


@pytest.fixture
def random_mixed_state() -> np.ndarray:
    rng = np.random.default_rng(7)
    a = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def tmp_output_dir(tmp_path: Path) -> Path:
    out = tmp_path / "runs"
    out.mkdir()
    return out


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Keep DICKESIM_* variables and a stray ./dickesim.json out of the tests."""
    for name in ("DICKESIM_CONFIG", "DICKESIM_OUTPUT_DIR", "DICKESIM_SEED"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
