"""Estimates from coincidence histograms with Poissonian and detector-efficiency error propagation.

Every estimator is a sum of per-histogram terms f_h(counts_h, efficiencies), each an efficiency-corrected
expectation of an outcome function. Errors are propagated either linearly (central differences) or by a
parametric Poisson bootstrap.
"""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from dickesim.errors import MissingSettingsError
from dickesim.experiment.measure import detector_weights, direction_setting, outcome_bits, pauli_setting_label
from dickesim.quantum.collective import PauliPolynomial, bell_polynomial
from dickesim.quantum.qcore import pauli_decompose
from dickesim.quantum.states import named_state
from dickesim.quantum.witness import (
    MOMENT_COEFFICIENTS,
    MOMENTS_OFFSET,
    decompose_settings,
    fidelity_bound_from_moments,
    projector,
)
from dickesim.types import (
    AXES,
    Axis,
    CountHistogram,
    Estimate,
    Observable,
    PureState,
    SettingDecomposition,
    WitnessSpec,
)

TermFn = Callable[[np.ndarray, np.ndarray], float]
REPORT_FORMAT_VERSION = 1


@dataclass
class Term:
    """One histogram and the functional it contributes to an estimate."""

    histogram: CountHistogram
    fn: TermFn

    def value(self) -> float:
        return self.fn(self.histogram.counts, self.histogram.efficiencies)


def _expectation_fn(num_sites: int, outcome_values: np.ndarray) -> TermFn:
    def fn(counts: np.ndarray, efficiencies: np.ndarray) -> float:
        corrected = counts / detector_weights(efficiencies, num_sites)
        total = corrected.sum()
        if total <= 0:
            raise ValueError("Histogram has no counts")
        return float(outcome_values @ corrected / total)

    return fn


def corrected_frequencies(hist: CountHistogram) -> np.ndarray:
    corrected = hist.counts / detector_weights(hist.efficiencies, hist.setting.num_sites)
    return corrected / corrected.sum()


def _signs(num_sites: int) -> np.ndarray:
    return 1 - 2 * outcome_bits(num_sites)


def _collective_m(num_sites: int) -> np.ndarray:
    """(n_first - n_second) / 2 for every outcome."""
    return _signs(num_sites).sum(axis=1) / 2


def _elementary_symmetric(num_sites: int) -> np.ndarray:
    """(2^n, n+1) table of e_k over the +-1 outcome values."""
    table = np.zeros((2**num_sites, num_sites + 1))
    for index, signs in enumerate(_signs(num_sites)):
        poly = np.array([1.0])
        for s in signs:
            poly = np.convolve(poly, [1.0, s])
        table[index] = poly
    return table


def propagate_error(
    terms: Sequence[Term],
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> float:
    """Standard deviation of sum_h f_h.

    Linear mode: sigma^2 = sum_bins (df/dn)^2 n + sum_dets (df/de)^2 sigma_e^2, derivatives by central
    differences. Bootstrap mode redraws every bin from Poisson(n) and each efficiency from N(e, sigma_e).
    """
    if not terms or all(t.histogram.exact for t in terms):
        return 0.0
    num_detectors = terms[0].histogram.efficiencies.size
    sigmas = np.zeros(num_detectors) if efficiency_sigmas is None else np.asarray(efficiency_sigmas, dtype=float)

    if bootstrap > 0:
        rng = np.random.default_rng(seed)
        samples = np.empty(bootstrap)
        for b in range(bootstrap):
            total = 0.0
            # one draw per detector, applied to the efficiencies each histogram was taken with
            shift = sigmas * rng.normal(size=num_detectors)
            for term in terms:
                counts = rng.poisson(term.histogram.counts).astype(float)
                effs = np.clip(term.histogram.efficiencies + shift, 1e-6, None)
                total += term.fn(counts, effs) if counts.sum() > 0 else term.value()
            samples[b] = total
        return float(np.std(samples, ddof=1))

    variance = 0.0
    for term in terms:
        counts, effs = term.histogram.counts, term.histogram.efficiencies
        step = 1e-4 * max(counts.sum(), 1.0)
        for index in np.flatnonzero(counts > 0):
            up, down = counts.copy(), counts.copy()
            up[index] += step
            down[index] -= min(step, counts[index])
            grad = (term.fn(up, effs) - term.fn(down, effs)) / (up[index] - down[index])
            variance += grad**2 * counts[index]
    for det in np.flatnonzero(sigmas > 0):
        grad = 0.0
        for term in terms:
            effs = term.histogram.efficiencies
            h = 1e-6 * effs[det]
            up, down = effs.copy(), effs.copy()
            up[det] += h
            down[det] -= h
            grad += (term.fn(term.histogram.counts, up) - term.fn(term.histogram.counts, down)) / (2 * h)
        variance += grad**2 * sigmas[det] ** 2
    return float(np.sqrt(variance))


def _estimate(
    terms: Sequence[Term],
    name: str,
    efficiency_sigmas: Sequence[float] | None,
    bootstrap: int,
    seed: int,
    offset: float = 0.0,
) -> Estimate:
    value = offset + sum(term.value() for term in terms)
    sigma = propagate_error(terms, efficiency_sigmas, bootstrap, seed)
    inputs = tuple(dict.fromkeys(term.histogram.label or term.histogram.setting.label for term in terms))
    return Estimate(float(value), sigma, inputs, name)


def index_histograms(histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram]) -> dict[str, CountHistogram]:
    if isinstance(histograms, Mapping):
        return dict(histograms)
    return {h.setting.label: h for h in histograms}


def _require(index: Mapping[str, CountHistogram], labels: Sequence[str]) -> list[CountHistogram]:
    missing = [label for label in labels if label not in index]
    if missing:
        raise MissingSettingsError(missing)
    return [index[label] for label in labels]


def correlation(
    hist: CountHistogram,
    sites: Sequence[int],
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    """Efficiency-corrected +-1 parity over the selected sites."""
    if hist.total <= 0:
        raise ValueError("Cannot estimate a correlation from an empty histogram")
    n = hist.setting.num_sites
    values = np.prod(_signs(n)[:, list(sites)], axis=1) if sites else np.ones(2**n)
    name = f"corr[{hist.setting.label}]({','.join(map(str, sites))})"
    return _estimate([Term(hist, _expectation_fn(n, values))], name, efficiency_sigmas, bootstrap, seed)


def _moment_term(hist: CountHistogram, power: int) -> Term:
    n = hist.setting.num_sites
    return Term(hist, _expectation_fn(n, _collective_m(n) ** power))


def _check_uniform(hist: CountHistogram, axis: Axis) -> None:
    if any(b != axis for b in hist.setting.bases):
        raise ValueError(f"Histogram {hist.setting.label} is not an all-{axis} measurement")


def j_moments_from_histograms(
    hist_x: CountHistogram,
    hist_y: CountHistogram,
    hist_z: CountHistogram | None = None,
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> dict[tuple[Axis, int], Estimate]:
    out: dict[tuple[Axis, int], Estimate] = {}
    for axis, hist in (("x", hist_x), ("y", hist_y), ("z", hist_z)):
        if hist is None:
            continue
        _check_uniform(hist, axis)  # type: ignore[arg-type]
        for power in (2, 4, 6):
            out[(axis, power)] = _estimate(  # type: ignore[index]
                [_moment_term(hist, power)], f"<J{axis}^{power}>", efficiency_sigmas, bootstrap, seed
            )
    return out


def _weighted_moment_terms(
    index: Mapping[str, CountHistogram], weights: Mapping[tuple[Axis, int], float], num_sites: int
) -> list[Term]:
    terms = []
    for axis in AXES:
        powers = {p: w for (a, p), w in weights.items() if a == axis and w != 0}
        if not powers:
            continue
        (hist,) = _require(index, [axis * num_sites])
        values = sum(w * _collective_m(num_sites) ** p for p, w in powers.items())
        terms.append(Term(hist, _expectation_fn(num_sites, values)))
    return terms


def _polynomial_terms(poly: PauliPolynomial, index: Mapping[str, CountHistogram]) -> list[Term]:
    by_setting: dict[str, list[tuple[str, float]]] = {}
    for label, coeff in poly.terms.items():
        by_setting.setdefault(pauli_setting_label(label), []).append((label, coeff.real))
    hists = _require(index, sorted(by_setting))
    terms = []
    for hist in hists:
        n = hist.setting.num_sites
        signs = _signs(n)
        values = np.zeros(2**n)
        for label, coeff in by_setting[hist.setting.label]:
            sites = [i for i, c in enumerate(label) if c != "I"]
            values += coeff * (np.prod(signs[:, sites], axis=1) if sites else 1.0)
        terms.append(Term(hist, _expectation_fn(n, values)))
    return terms


def estimate_observable(
    obs: Observable | PauliPolynomial,
    histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram],
    name: str | None = None,
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    """Expectation of an operator from the Pauli-basis settings of its expansion."""
    poly = obs if isinstance(obs, PauliPolynomial) else PauliPolynomial(pauli_decompose(obs.matrix))
    terms = _polynomial_terms(poly, index_histograms(histograms))
    return _estimate(terms, name or "observable", efficiency_sigmas, bootstrap, seed)


def bell_estimate(
    histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram],
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    return estimate_observable(bell_polynomial(), histograms, "<B_D63>", efficiency_sigmas, bootstrap, seed)


def estimate_fidelity(
    decomposition: SettingDecomposition,
    histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram],
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    """F = sum_j sum_k c_jk <Sym_k(n_j)>, each symmetrized moment read off as e_k of the +-1 outcomes."""
    index = index_histograms(histograms)
    n = decomposition.num_qubits
    settings = [direction_setting(d, n) for d in decomposition.directions]
    hists = _require(index, [s.label for s in settings])
    table = _elementary_symmetric(n)
    terms = [
        Term(hist, _expectation_fn(n, table @ np.asarray(coeffs)))
        for hist, coeffs in zip(hists, decomposition.coefficients, strict=True)
    ]
    name = f"F[{decomposition.target or 'target'}]"
    return _estimate(terms, name, efficiency_sigmas, bootstrap, seed)


def full_pauli_settings(target: PureState) -> list[str]:
    proj = np.outer(target.amplitudes, target.amplitudes.conj())
    return sorted({pauli_setting_label(label) for label in pauli_decompose(proj)})


def estimate_fidelity_full_pauli(
    target: PureState,
    histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram],
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    """Reference fidelity from the full Pauli expansion of the target projector."""
    proj = Observable(np.outer(target.amplitudes, target.amplitudes.conj()))
    name = f"F_pauli[{target.label or 'target'}]"
    return estimate_observable(proj, histograms, name, efficiency_sigmas, bootstrap, seed)


def evaluate_witness_from_data(
    spec: WitnessSpec,
    histograms: Sequence[CountHistogram] | Mapping[str, CountHistogram],
    decomposition: SettingDecomposition | None = None,
    efficiency_sigmas: Sequence[float] | None = None,
    bootstrap: int = 0,
    seed: int = 0,
) -> Estimate:
    index = index_histograms(histograms)
    n = spec.num_qubits
    name = spec.name or spec.kind
    match spec.kind:
        case "j2":
            weights = {("x", 2): -1.0, ("y", 2): -1.0}
            terms = _weighted_moment_terms(index, weights, n)
            return _estimate(terms, name, efficiency_sigmas, bootstrap, seed, offset=spec.alpha)
        case "moments":
            weights = {
                (axis, 2 * j): float(c) for axis, row in MOMENT_COEFFICIENTS.items() for j, c in enumerate(row, 1)
            }
            terms = _weighted_moment_terms(index, weights, n)
            return _estimate(terms, name, efficiency_sigmas, bootstrap, seed, offset=MOMENTS_OFFSET)
        case "ghz-two-setting":
            hist_x, hist_z = _require(index, ["x" * n, "z" * n])
            weight = outcome_bits(n).sum(axis=1)
            odd_parity = (weight % 2 == 1).astype(float)
            population = ((weight == 0) | (weight == n)).astype(float)
            terms = [
                Term(hist_z, _expectation_fn(n, -odd_parity)),
                Term(hist_x, _expectation_fn(n, -population)),
            ]
            return _estimate(terms, name, efficiency_sigmas, bootstrap, seed, offset=spec.alpha)
        case "projector":
            target = named_state(spec.target or "d63")
            if decomposition is None:
                decomposition = decompose_settings(Observable(projector([target])), 21, label=target.label)
            fidelity = estimate_fidelity(decomposition, index, efficiency_sigmas, bootstrap, seed)
            return Estimate(spec.alpha - fidelity.value, fidelity.sigma, fidelity.inputs, name)
        case "subspace":
            targets = [named_state(label) for label in (spec.target or "").split("+")]
            overlap = estimate_observable(
                Observable(projector(targets)), index, name, efficiency_sigmas, bootstrap, seed
            )
            return Estimate(spec.alpha - overlap.value, overlap.sigma, overlap.inputs, name)
    raise ValueError(f"Unknown witness kind: {spec.kind}")


def fidelity_bound_estimate(w_estimate: Estimate) -> Estimate:
    bound = fidelity_bound_from_moments(w_estimate.value)
    return Estimate(bound, w_estimate.sigma / 2.5, w_estimate.inputs, "F_bound")


def build_report(
    estimates: Sequence[Estimate], thresholds: Sequence[tuple[str, str, float]] = ()
) -> dict[str, Any]:
    """Report document; thresholds are (estimate name, comparison, value) with comparison in <, <=, >, >=."""
    comparisons: dict[str, Callable[[float, float], bool]] = {
        "<": lambda a, b: a < b,
        "<=": lambda a, b: a <= b,
        ">": lambda a, b: a > b,
        ">=": lambda a, b: a >= b,
    }
    by_name = {e.name: e for e in estimates}
    checks = []
    for name, op, threshold in thresholds:
        if op not in comparisons:
            raise ValueError(f"Unknown comparison: {op}")
        if name not in by_name:
            raise KeyError(f"No estimate named {name}")
        checks.append(
            {
                "name": name,
                "comparison": op,
                "threshold": threshold,
                "passed": comparisons[op](by_name[name].value, threshold),
            }
        )
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "estimates": [
            {"name": e.name, "value": e.value, "sigma": e.sigma, "inputs": list(e.inputs)} for e in estimates
        ],
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
