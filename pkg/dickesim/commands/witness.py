"""Witness command: the catalog of witness specifications."""

from pathlib import Path

from dickesim.commands import reported_errors
from dickesim.quantum.states import named_state, rho5
from dickesim.quantum.witness import evaluate_witness, witness_catalog
from dickesim.types import WitnessSpec
from dickesim.utils.documents import witness_to_dict, write_document
from dickesim.utils.formatter import format_output


def _settings_label(spec: WitnessSpec) -> str:
    if spec.settings:
        return ",".join(spec.settings)
    # projector witnesses are read from a decomposition, subspace witnesses from Pauli settings
    return "decomposition" if spec.kind == "projector" else "pauli"


def list_witnesses(fmt: str = "pretty", evaluate: str | None = None) -> None:
    """One row per catalog entry; with evaluate, the exact value on that named state where sizes match."""
    with reported_errors("listing witnesses"):
        catalog = witness_catalog()
        state = None
        if evaluate is not None:
            state = rho5() if evaluate.strip().lower() == "rho5" else named_state(evaluate)

        rows = []
        for name, spec in catalog.items():
            row: dict[str, object] = {
                "name": name,
                "kind": spec.kind,
                "alpha": spec.alpha,
                "qubits": spec.num_qubits,
                "settings": _settings_label(spec),
            }
            if state is not None and state.num_qubits == spec.num_qubits:
                row["value"] = evaluate_witness(spec, state)
            rows.append(row)

    print(format_output(rows, fmt))


def export_witness(name: str, out: str) -> Path:
    with reported_errors("exporting witness"):
        catalog = witness_catalog()
        if name not in catalog:
            raise ValueError(f"Unknown witness: {name} (known: {', '.join(catalog)})")
        path = Path(out)
        write_document(path, witness_to_dict(catalog[name]))
    print(str(path))
    return path
