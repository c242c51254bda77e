"""Local measurement settings, exact outcome distributions and Poissonian coincidence histograms.

Outcome bit 0 in a mode means the detector of the analyzer's first eigenvector fired; mode a is the most
significant bit. Detector 2*m + bit belongs to mode m.
"""

from collections.abc import Sequence

import numpy as np

from dickesim.quantum.collective import PauliPolynomial
from dickesim.quantum.qcore import State, apply_local, as_mixed, basis_change
from dickesim.quantum.states import analyzer_ket
from dickesim.types import AXES, Axis, Basis, CountHistogram, LocalSetting

AXIS_DIRECTIONS: dict[Axis, tuple[float, float, float]] = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


def outcome_bits(num_sites: int) -> np.ndarray:
    """(2^n, n) array of outcome bits, site 0 first."""
    index = np.arange(2**num_sites)
    return (index[:, None] >> np.arange(num_sites - 1, -1, -1)) & 1


def basis_unitary(basis: Basis) -> np.ndarray:
    """Rows are the bras of the (first, second) analyzer eigenvectors."""
    if isinstance(basis, str):
        return basis_change(basis)  # type: ignore[arg-type]
    theta, phi = basis
    first = analyzer_ket(theta, phi).amplitudes
    second = np.array([np.cos(theta), -np.sin(theta) * np.exp(1j * phi)])
    return np.vstack([first.conj(), second.conj()])


def direction_to_basis(direction: Sequence[float], tol: float = 1e-12) -> Basis:
    """Analyzer whose first eigenvector is the +1 eigenvector of n.sigma."""
    for axis, axis_direction in AXIS_DIRECTIONS.items():
        if np.allclose(direction, axis_direction, atol=tol):
            return axis
    nx, ny, nz = direction
    polar = float(np.arccos(np.clip(nz, -1.0, 1.0)))
    return (np.pi / 2 - polar / 2, float(np.arctan2(ny, nx)))


def uniform_setting(axis: Axis, num_sites: int = 6) -> LocalSetting:
    return LocalSetting((axis,) * num_sites)


def direction_setting(direction: Sequence[float], num_sites: int = 6) -> LocalSetting:
    return LocalSetting((direction_to_basis(direction),) * num_sites)


def setting_from_label(label: str) -> LocalSetting:
    return LocalSetting(tuple(label.strip().lower()))


def pauli_setting_label(pauli: str) -> str:
    """Setting that measures a Pauli string; identity positions are read out in z."""
    return pauli.upper().replace("I", "Z").lower()


def bell_settings(poly: PauliPolynomial) -> list[LocalSetting]:
    labels = sorted({pauli_setting_label(label) for label in poly.terms})
    return [setting_from_label(label) for label in labels]


def outcome_distribution(state: State, setting: LocalSetting) -> np.ndarray:
    if setting.num_sites != state.num_qubits:
        raise ValueError(f"Setting covers {setting.num_sites} sites, state has {state.num_qubits} qubits")
    rotated = apply_local(as_mixed(state), [basis_unitary(b) for b in setting.bases])
    probs = np.clip(np.real(np.diag(rotated.matrix)), 0.0, None)
    return probs / probs.sum()


def detector_weights(efficiencies: np.ndarray, num_sites: int) -> np.ndarray:
    """Product of the firing detectors' efficiencies for every outcome."""
    effs = np.asarray(efficiencies, dtype=float)
    if effs.shape != (2 * num_sites,):
        raise ValueError(f"Expected {2 * num_sites} detector efficiencies, got {effs.shape}")
    if np.any(effs <= 0):
        raise ValueError("Detector efficiencies must be positive")
    bits = outcome_bits(num_sites)
    detectors = 2 * np.arange(num_sites) + bits
    return np.prod(effs[detectors], axis=1)


def apply_efficiencies(probs: np.ndarray, efficiencies: np.ndarray, setting: LocalSetting) -> np.ndarray:
    """Outcome rates, not renormalized."""
    return np.asarray(probs, dtype=float) * detector_weights(efficiencies, setting.num_sites)


def sample_histogram(
    rates: np.ndarray,
    expected_total: float,
    setting: LocalSetting,
    duration: float = 0.0,
    seed: int = 0,
    setting_index: int = 0,
    efficiencies: np.ndarray | None = None,
) -> CountHistogram:
    """Independent Poisson counts per bin with means expected_total * rates / sum(rates)."""
    if expected_total <= 0:
        raise ValueError("Expected number of events must be positive")
    rates = np.asarray(rates, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence([seed, setting_index]))
    counts = rng.poisson(expected_total * rates / rates.sum())
    effs = np.ones(2 * setting.num_sites) if efficiencies is None else np.asarray(efficiencies, dtype=float)
    return CountHistogram(setting, counts, duration=duration, efficiencies=effs, seed=seed)


def exact_histogram(
    state: State,
    setting: LocalSetting,
    expected_total: float = 1.0,
    efficiencies: np.ndarray | None = None,
    duration: float = 0.0,
) -> CountHistogram:
    """Infinite-statistics histogram: counts are the expected values."""
    effs = np.ones(2 * setting.num_sites) if efficiencies is None else np.asarray(efficiencies, dtype=float)
    rates = apply_efficiencies(outcome_distribution(state, setting), effs, setting)
    return CountHistogram(
        setting, expected_total * rates / rates.sum(), duration=duration, efficiencies=effs, exact=True
    )


def simulate_histograms(
    state: State,
    settings: Sequence[LocalSetting],
    expected_total: float,
    duration: float = 0.0,
    seed: int = 0,
    efficiencies: np.ndarray | None = None,
    exact: bool = False,
) -> list[CountHistogram]:
    out = []
    for index, setting in enumerate(settings):
        if exact:
            out.append(exact_histogram(state, setting, expected_total, efficiencies, duration))
            continue
        effs = np.ones(2 * setting.num_sites) if efficiencies is None else np.asarray(efficiencies, dtype=float)
        rates = apply_efficiencies(outcome_distribution(state, setting), effs, setting)
        out.append(sample_histogram(rates, expected_total, setting, duration, seed, index, effs))
    return out


def standard_settings(num_sites: int = 6) -> list[LocalSetting]:
    return [uniform_setting(axis, num_sites) for axis in AXES]
