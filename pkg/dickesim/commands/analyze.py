"""Analyze command: estimates, witnesses and threshold checks from histogram documents."""

import sys
from pathlib import Path

from dickesim.commands import err_console, reported_errors, verbose_line
from dickesim.errors import EXIT_FAILURE, MissingSettingsError, SchemaError
from dickesim.experiment.analysis import (
    bell_estimate,
    build_report,
    estimate_fidelity,
    estimate_fidelity_full_pauli,
    evaluate_witness_from_data,
    fidelity_bound_estimate,
    index_histograms,
    j_moments_from_histograms,
)
from dickesim.quantum.states import named_state
from dickesim.quantum.witness import witness_catalog
from dickesim.types import CountHistogram, Estimate, SettingDecomposition, WitnessSpec
from dickesim.utils.config import load_run_config
from dickesim.utils.documents import (
    decomposition_from_dict,
    read_document,
    read_histograms,
    report_to_dict,
    witness_from_dict,
    write_document,
)
from dickesim.utils.formatter import format_output

DEFAULT_REPORT_NAME = "report.json"


def _num_sites(histograms: list[CountHistogram]) -> int:
    sizes = {h.setting.num_sites for h in histograms}
    if len(sizes) != 1:
        raise SchemaError(f"histograms mix {sorted(sizes)} qubits")
    return sizes.pop()


def _moment_estimates(index: dict[str, CountHistogram], n: int, **kwargs: object) -> list[Estimate]:
    hist_x, hist_y, hist_z = (index.get(axis * n) for axis in "xyz")
    if hist_x is None or hist_y is None:
        return []
    moments = j_moments_from_histograms(hist_x, hist_y, hist_z, **kwargs)  # type: ignore[arg-type]
    return list(moments.values())


def load_witnesses(requested: list[str] | None) -> tuple[dict[str, WitnessSpec], list[str] | None]:
    """The catalog plus any witness documents among the requested entries, and the selected names."""
    catalog = witness_catalog()
    if requested is None:
        return catalog, None
    selected = []
    for entry in requested:
        path = Path(entry)
        if path.suffix == ".json" or path.exists():
            spec = witness_from_dict(read_document(path, "witness"), f"{path.name}:$")
            name = spec.name or path.stem
            catalog[name] = spec
            selected.append(name)
        else:
            selected.append(entry)
    return catalog, selected


def _witness_estimates(
    index: dict[str, CountHistogram],
    n: int,
    requested: list[str] | None,
    decomposition: SettingDecomposition | None,
    verbose: bool,
    **kwargs: object,
) -> list[Estimate]:
    catalog, requested = load_witnesses(requested)
    unknown = [name for name in requested or [] if name not in catalog]
    if unknown:
        raise ValueError(f"Unknown witness: {', '.join(unknown)} (known: {', '.join(catalog)})")

    out = []
    for name, spec in catalog.items():
        explicit = requested is not None and name in requested
        if requested is not None and not explicit:
            continue
        if spec.num_qubits != n:
            if explicit:
                raise ValueError(f"Witness {name} acts on {spec.num_qubits} qubits, histograms have {n}")
            continue
        # the projector witness needs the direction settings of a decomposition
        if spec.kind == "projector" and decomposition is None and not explicit:
            continue
        try:
            out.append(evaluate_witness_from_data(spec, index, decomposition, **kwargs))  # type: ignore[arg-type]
        except MissingSettingsError as e:
            if explicit:
                raise
            verbose_line(verbose, f"skipping {name}: {e}")
    return out


def analyze_histograms(
    histograms: list[CountHistogram],
    decomposition: SettingDecomposition | None = None,
    witnesses: list[str] | None = None,
    target: str = "d63",
    efficiency_sigmas: list[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
    verbose: bool = False,
) -> list[Estimate]:
    if not histograms:
        raise ValueError("No histograms to analyze")
    index = index_histograms(histograms)
    n = _num_sites(histograms)
    sigmas = efficiency_sigmas[: 2 * n] if efficiency_sigmas is not None else None
    kwargs: dict[str, object] = {"efficiency_sigmas": sigmas, "bootstrap": bootstrap, "seed": seed}

    estimates = _moment_estimates(index, n, **kwargs)
    found = _witness_estimates(index, n, witnesses, decomposition, verbose, **kwargs)
    estimates += found
    for estimate in found:
        if estimate.name == "moments-6":
            estimates.append(fidelity_bound_estimate(estimate))

    if decomposition is not None:
        estimates.append(estimate_fidelity(decomposition, index, **kwargs))  # type: ignore[arg-type]
    elif n == named_state(target).num_qubits:
        try:
            full = estimate_fidelity_full_pauli(named_state(target), index, **kwargs)  # type: ignore[arg-type]
            estimates.append(full)
        except MissingSettingsError as e:
            verbose_line(verbose, f"skipping full Pauli fidelity: {len(e.missing)} settings missing")

    if n == 6:
        try:
            estimates.append(bell_estimate(index, **kwargs))  # type: ignore[arg-type]
        except MissingSettingsError as e:
            verbose_line(verbose, f"skipping Bell operator: {len(e.missing)} settings missing")
    return estimates


def run_analyze(
    files: list[str],
    config_path: str | None = None,
    decomposition: str | None = None,
    witnesses: list[str] | None = None,
    target: str = "d63",
    thresholds: list[tuple[str, str, float]] | None = None,
    bootstrap: int = 0,
    seed: int | None = None,
    out: str | None = None,
    fmt: str = "pretty",
    verbose: bool = False,
) -> dict[str, object]:
    with reported_errors("analyzing"):
        config = load_run_config(config_path)
        paths = [Path(f) for f in files]
        histograms = read_histograms(paths)
        decomp = None
        if decomposition is not None:
            decomp_path = Path(decomposition)
            decomp = decomposition_from_dict(
                read_document(decomp_path, "decomposition"), f"{decomp_path.name}:$"
            )
        for hist in histograms:
            verbose_line(verbose, f"{hist.label}: {hist.total:.0f} events")

        estimates = analyze_histograms(
            histograms,
            decomp,
            witnesses,
            target,
            config.efficiency_sigmas,
            bootstrap,
            seed if seed is not None else config.seed,
            verbose,
        )
        report = report_to_dict(build_report(estimates, thresholds or []))
        report["inputs"] = [str(p) for p in paths]
        report["bootstrap"] = bootstrap

        report_path = Path(out) if out else Path(config.output_dir) / DEFAULT_REPORT_NAME
        write_document(report_path, report)
        verbose_line(verbose, f"report -> {report_path}")

    rows = [{"name": e["name"], "value": e["value"], "sigma": e["sigma"]} for e in report["estimates"]]
    print(format_output(rows, fmt))
    for check in report["checks"]:
        colour = "green" if check["passed"] else "red"
        err_console.print(
            f"[{colour}]{check['name']} {check['comparison']} {check['threshold']}: "
            f"{'passed' if check['passed'] else 'failed'}[/{colour}]",
            highlight=False,
        )
    if not report["passed"]:
        sys.exit(EXIT_FAILURE)
    return report
