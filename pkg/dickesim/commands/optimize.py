"""Optimize command: biseparable bounds of named or stored observables."""

from pathlib import Path

import numpy as np

from dickesim.commands import reported_errors, verbose_line
from dickesim.quantum.collective import PauliPolynomial, bell_d63, j_squared
from dickesim.quantum.qcore import pauli_decompose
from dickesim.quantum.states import NAMED_STATES, named_state
from dickesim.quantum.witness import SEESAW_RESTARTS, optimize_bisep_bound, projector
from dickesim.types import Bipartition, Observable
from dickesim.utils.documents import observable_terms_from_dict, observable_to_dict, read_document, write_document
from dickesim.utils.formatter import format_amplitude, format_output

PROJECTOR_SUFFIX = "-projector"


def named_observable(name: str) -> Observable:
    """jxy2-6qubit, bell-d63, identity, or <state>-projector for any named state."""
    key = name.strip().lower()
    if key == "jxy2-6qubit":
        return j_squared(6, ("x", "y"))
    if key == "bell-d63":
        return bell_d63()
    if key == "identity":
        return Observable(np.eye(64, dtype=complex), label="identity")
    if key.endswith(PROJECTOR_SUFFIX):
        state = named_state(key.removesuffix(PROJECTOR_SUFFIX))
        return Observable(projector([state]), label=key)
    known = ["jxy2-6qubit", "bell-d63", "identity"] + [f"{s}{PROJECTOR_SUFFIX}" for s in NAMED_STATES]
    raise ValueError(f"Unknown observable: {name} (known: {', '.join(known)} or a JSON observable file)")


def load_observable(name_or_file: str) -> Observable:
    path = Path(name_or_file)
    if path.suffix == ".json" or path.exists():
        terms = observable_terms_from_dict(read_document(path, "observable"), f"{path.name}:$")
        return PauliPolynomial(terms).observable(label=path.stem)
    return named_observable(name_or_file)


def run_optimize(
    observable: str,
    restarts: int = SEESAW_RESTARTS,
    seed: int | None = None,
    save: str | None = None,
    fmt: str = "pretty",
    verbose: bool = False,
) -> float:
    with reported_errors("optimizing"):
        obs = load_observable(observable)
        if save:
            write_document(Path(save), observable_to_dict(pauli_decompose(obs.matrix), obs.label))
            verbose_line(verbose, f"observable -> {save}")

        def report_cut(cut: Bipartition, value: float) -> None:
            verbose_line(verbose, f"cut {cut}: {value:.10f}")

        bound = optimize_bisep_bound(obs, restarts=restarts, seed=seed or 0, on_cut=report_cut)

    n = bound.state.num_qubits
    rows: list[dict[str, object]] = [
        {
            "name": "alpha",
            "value": bound.value,
            "bipartition": str(bound.bipartition),
            "converged": bound.converged,
        }
    ]
    amplitudes = bound.state.amplitudes
    for index in np.flatnonzero(np.abs(amplitudes) > 1e-6):
        rows.append({"name": f"|{index:0{n}b}>", "amplitude": format_amplitude(complex(amplitudes[index]))})
    print(format_output(rows, fmt))
    return bound.value
