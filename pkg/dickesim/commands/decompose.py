"""Decompose command: local measurement settings for a symmetric target operator."""

from pathlib import Path

from dickesim.commands import reported_errors, verbose_line
from dickesim.experiment.measure import direction_setting
from dickesim.quantum.collective import j_power
from dickesim.quantum.states import named_state
from dickesim.quantum.witness import decompose_settings, projector
from dickesim.types import Observable, SettingDecomposition
from dickesim.utils.config import load_run_config
from dickesim.utils.documents import decomposition_to_dict, write_document
from dickesim.utils.formatter import format_output

DEFAULT_BUDGET = 21


def target_operator(name: str) -> Observable:
    key = name.strip().lower()
    if key.startswith("jz2"):
        # jz2 on six qubits, jz2-4 on four
        n = int(key.removeprefix("jz2").lstrip("-") or 6)
        return Observable(j_power(n, "z", 2).matrix, label=key)
    return Observable(projector([named_state(key)]), label=key)


def run_decompose(
    target: str,
    budget: int = DEFAULT_BUDGET,
    config_path: str | None = None,
    out: str | None = None,
    fmt: str = "pretty",
    verbose: bool = False,
) -> SettingDecomposition:
    with reported_errors("decomposing"):
        config = load_run_config(config_path)
        operator = target_operator(target)
        decomposition = decompose_settings(operator, budget, label=operator.label)
        path = Path(out) if out else Path(config.output_dir) / f"decomposition-{operator.label}.json"
        write_document(path, decomposition_to_dict(decomposition))
        verbose_line(verbose, f"residual {decomposition.residual:.3e} -> {path}")

    rows: list[dict[str, object]] = [
        {
            "name": decomposition.target,
            "value": decomposition.num_settings,
            "residual": decomposition.residual,
            "file": str(path),
        }
    ]
    if verbose:
        rows += [
            {"name": direction_setting(d, decomposition.num_qubits).bases[0], "direction": list(d)}
            for d in decomposition.directions
        ]
    print(format_output(rows, fmt))
    return decomposition
