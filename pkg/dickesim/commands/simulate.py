"""Simulate command: one histogram document per measurement setting."""

from pathlib import Path

import numpy as np

from dickesim.commands import reported_errors, verbose_line
from dickesim.errors import ConfigError
from dickesim.experiment.measure import (
    apply_efficiencies,
    direction_setting,
    outcome_bits,
    outcome_distribution,
    pauli_setting_label,
    setting_from_label,
    simulate_histograms,
)
from dickesim.experiment.photonics import default_tree, source_fidelity, source_state
from dickesim.quantum.qcore import State, pauli_decompose
from dickesim.quantum.states import named_state, rho5
from dickesim.quantum.witness import projector
from dickesim.types import CountHistogram, LocalSetting, RunConfig
from dickesim.utils.config import apply_preset, expected_events_per_setting, load_run_config
from dickesim.utils.documents import decomposition_from_dict, histogram_to_dict, read_document, write_document
from dickesim.utils.formatter import format_output
from dickesim.utils.options import normalize_settings_option

PAULI_SETTINGS = "pauli"


def _target_state(config: RunConfig, state_name: str | None, verbose: bool) -> State:
    if state_name is None:
        tree = config.tree or default_tree()
        if verbose:
            verbose_line(verbose, f"source fidelity with D(6,3): {source_fidelity(config.source, tree):.4f}")
        return source_state(config.source, tree)
    if state_name.strip().lower() == "rho5":
        return rho5()
    return named_state(state_name)


def _pauli_reference(state_name: str | None) -> str:
    if state_name is None:
        return "d63"
    # rho5 is read out through the span of the five-qubit Dicke states it mixes
    return "d52+d53" if state_name.strip().lower() == "rho5" else state_name


def pauli_settings(reference: str) -> list[str]:
    """Settings covering the Pauli expansion of the projector onto the named states (joined by +)."""
    targets = [named_state(name) for name in reference.split("+")]
    return sorted({pauli_setting_label(label) for label in pauli_decompose(projector(targets))})


def _settings(config: RunConfig, decomposition: str | None) -> list[LocalSetting]:
    if decomposition is None:
        return [setting_from_label(label) for label in config.settings]
    path = Path(decomposition)
    decomp = decomposition_from_dict(read_document(path, "decomposition"), f"{path.name}:$")
    return [direction_setting(d, decomp.num_qubits) for d in decomp.directions]


def histogram_filename(index: int, setting: LocalSetting) -> str:
    if all(isinstance(b, str) for b in setting.bases):
        return f"{index:02d}-{setting.label}.json"
    return f"{index:02d}-direction.json"


def _csv_rows(hist: CountHistogram, theory: np.ndarray) -> list[dict[str, object]]:
    bits = outcome_bits(hist.setting.num_sites)
    return [
        {"outcome": "".join(str(b) for b in row), "count": hist.counts[i].item(), "theory": float(theory[i])}
        for i, row in enumerate(bits)
    ]


def run_simulate(
    config_path: str | None = None,
    seed: int | None = None,
    out: str | None = None,
    settings: str | None = None,
    decomposition: str | None = None,
    state: str | None = None,
    preset: str | None = None,
    exact: bool = False,
    emit_csv: bool = False,
    fmt: str = "pretty",
    verbose: bool = False,
) -> list[Path]:
    with reported_errors("simulating"):
        config = load_run_config(config_path)
        if preset:
            apply_preset(config, preset)
        if seed is not None:
            config.seed = seed

        target = _target_state(config, state, verbose)
        n = target.num_qubits
        if settings and settings.strip().lower() == PAULI_SETTINGS:
            config.settings = pauli_settings(_pauli_reference(state))
        elif settings:
            try:
                config.settings = normalize_settings_option(settings, num_sites=n) or config.settings
            except ValueError as e:
                raise ConfigError(str(e), "settings") from e
        local = _settings(config, decomposition)
        mismatched = [s.label for s in local if s.num_sites != n]
        if mismatched:
            raise ConfigError(f"{', '.join(mismatched)} do not match the {n}-qubit state", "settings")

        per_setting = expected_events_per_setting(config, len(local))
        duration = config.duration_hours * 3600 / len(local)
        efficiencies = np.asarray(config.efficiencies[: 2 * n], dtype=float)
        verbose_line(verbose, f"{len(local)} settings, {per_setting:.1f} expected events each")

        histograms = simulate_histograms(
            target, local, per_setting, duration=duration, seed=config.seed, efficiencies=efficiencies, exact=exact
        )

        out_dir = Path(out or config.output_dir)
        written: list[Path] = []
        rows = []
        for index, hist in enumerate(histograms):
            rates = apply_efficiencies(outcome_distribution(target, hist.setting), efficiencies, hist.setting)
            theory = rates / rates.sum()
            path = out_dir / histogram_filename(index, hist.setting)
            write_document(path, histogram_to_dict(hist, theory))
            written.append(path)
            if emit_csv:
                csv_path = path.with_suffix(".csv")
                csv_text = format_output(_csv_rows(hist, theory * per_setting), "csv")
                csv_path.write_text(csv_text + "\n", encoding="utf-8")
            verbose_line(verbose, f"{hist.setting.label}: {hist.total:.0f} events -> {path}")
            rows.append({"name": hist.setting.label, "value": hist.total, "file": str(path)})

    print(format_output(rows, fmt))
    return written
