"""Collective spin operators, Mermin polynomials and the Bell operator tailored to D(6,3)."""

from collections import defaultdict
from collections.abc import Iterable, Mapping
from functools import cache

import numpy as np
from scipy.optimize import minimize

from dickesim.quantum.qcore import (
    AXIS_EIGENVECTORS,
    PAULI,
    State,
    apply_local,
    expectation,
    kron_all,
    pauli_decompose,
    pauli_string_matrix,
    single_site,
)
from dickesim.quantum.states import dicke
from dickesim.types import AXES, MAX_QUBITS, Axis, Observable, PureState

MOMENT_POWERS = (2, 4, 6)
BELL_PREFACTOR = 4 / 5
LHV_MAX_VARIABLES = 20


def collective_j(num_qubits: int, axis: Axis) -> Observable:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"Collective operators need 1..{MAX_QUBITS} qubits, got {num_qubits}")
    op = PAULI[axis.upper()]
    matrix = sum(single_site(op, k, num_qubits) for k in range(num_qubits)) / 2
    return Observable(matrix, label=f"J{axis}")


@cache
def _j_power(num_qubits: int, axis: Axis, power: int) -> np.ndarray:
    return np.linalg.matrix_power(collective_j(num_qubits, axis).matrix, power)


def j_power(num_qubits: int, axis: Axis, power: int) -> Observable:
    return Observable(_j_power(num_qubits, axis, power), label=f"J{axis}^{power}")


def j_moment(state: State, axis: Axis, power: int) -> float:
    if power not in MOMENT_POWERS:
        raise ValueError(f"Only even moments {MOMENT_POWERS} are supported, got {power}")
    return expectation(state, j_power(state.num_qubits, axis, power))


def j_squared(num_qubits: int, axes: Iterable[Axis] = AXES) -> Observable:
    matrix = sum(_j_power(num_qubits, axis, 2) for axis in axes)
    return Observable(matrix, label="J^2")


class PauliPolynomial:
    """Linear combination of Pauli strings over I, X, Y, Z."""

    def __init__(self, terms: Mapping[str, complex] | None = None) -> None:
        self.terms: dict[str, complex] = {}
        for label, coeff in (terms or {}).items():
            if abs(coeff) > 1e-15:
                self.terms[label.upper()] = complex(coeff)

    @classmethod
    def single(cls, axis: str) -> "PauliPolynomial":
        return cls({axis.upper(): 1.0})

    @classmethod
    def from_observable(cls, obs: Observable) -> "PauliPolynomial":
        return cls(pauli_decompose(obs.matrix))

    @property
    def num_qubits(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def __add__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        out: dict[str, complex] = defaultdict(complex, self.terms)
        for label, coeff in other.terms.items():
            out[label] += coeff
        return PauliPolynomial(out)

    def __sub__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        return self + other * -1

    def __mul__(self, scalar: complex) -> "PauliPolynomial":
        return PauliPolynomial({label: coeff * scalar for label, coeff in self.terms.items()})

    __rmul__ = __mul__

    def tensor(self, other: "PauliPolynomial") -> "PauliPolynomial":
        out: dict[str, complex] = defaultdict(complex)
        for la, ca in self.terms.items():
            for lb, cb in other.terms.items():
                out[la + lb] += ca * cb
        return PauliPolynomial(out)

    def matrix(self) -> np.ndarray:
        return sum(coeff * pauli_string_matrix(label) for label, coeff in self.terms.items())

    def observable(self, label: str | None = None) -> Observable:
        return Observable(self.matrix(), label=label)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"PauliPolynomial({len(self.terms)} terms on {self.num_qubits} qubits)"


def mermin_polynomials(n: int, a: Axis = "x", b: Axis = "y") -> tuple[PauliPolynomial, PauliPolynomial]:
    if n < 1:
        raise ValueError("Mermin operators need at least one qubit")
    pa, pb = PauliPolynomial.single(a), PauliPolynomial.single(b)
    m, m_prime = pa, pb
    for _ in range(n - 1):
        m, m_prime = (
            (m.tensor(pa + pb) + m_prime.tensor(pa - pb)) * 0.5,
            (m_prime.tensor(pb + pa) + m.tensor(pb - pa)) * 0.5,
        )
    return m, m_prime


def mermin(n: int, a: Axis = "x", b: Axis = "y") -> tuple[Observable, Observable]:
    """M_n and M'_n from the recursion seeded with M_1 = sigma_a, M'_1 = sigma_b."""
    m, m_prime = mermin_polynomials(n, a, b)
    return m.observable(f"M{n}"), m_prime.observable(f"M{n}'")


@cache
def bell_polynomial() -> PauliPolynomial:
    # sigma_x (x) M5(x,z) + sigma_y (x) M5(y,z), scaled so that <D(6,3)|B|D(6,3)> = 1
    m5_x, _ = mermin_polynomials(5, "x", "z")
    m5_y, _ = mermin_polynomials(5, "y", "z")
    raw = PauliPolynomial.single("x").tensor(m5_x) + PauliPolynomial.single("y").tensor(m5_y)
    anchor = expectation(dicke((6, 3)), raw.observable())
    kappa = 1.0 / (BELL_PREFACTOR * anchor)
    return raw * (BELL_PREFACTOR * kappa)


def bell_d63() -> Observable:
    return bell_polynomial().observable("B_D63")


def _site_variables(poly: PauliPolynomial) -> list[tuple[int, str]]:
    used = {(site, op) for label in poly.terms for site, op in enumerate(label) if op != "I"}
    return sorted(used)


def lhv_maximum(obs: Observable | PauliPolynomial) -> float:
    """Largest |value| of the operator over deterministic local +-1 assignments, one per (site, Pauli)."""
    poly = obs if isinstance(obs, PauliPolynomial) else PauliPolynomial.from_observable(obs)
    variables = _site_variables(poly)
    if len(variables) > LHV_MAX_VARIABLES:
        raise ValueError(f"{len(variables)} local observables exceed the enumeration limit of {LHV_MAX_VARIABLES}")
    index = {var: i for i, var in enumerate(variables)}
    strategies = 1 - 2 * ((np.arange(2 ** len(variables))[:, None] >> np.arange(len(variables))) & 1).astype(np.int8)
    values = np.zeros(strategies.shape[0])
    for label, coeff in poly.terms.items():
        columns = [index[(site, op)] for site, op in enumerate(label) if op != "I"]
        outcome = np.prod(strategies[:, columns], axis=1) if columns else np.ones(strategies.shape[0])
        values += coeff.real * outcome
    return float(np.max(np.abs(values)))


def _rz(angle: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * angle)])


def ghz_family_state(params: np.ndarray, frame: Axis = "x") -> PureState:
    """GHZ in the eigenbasis of `frame` with relative phase params[0] and z rotations params[1:] per site."""
    first, second = AXIS_EIGENVECTORS[frame]
    amps = (kron_all([first] * 6) + np.exp(1j * params[0]) * kron_all([second] * 6)) / np.sqrt(2)
    rotated = apply_local(PureState(amps), [_rz(angle) for angle in params[1:]])
    return PureState(rotated.amplitudes, label=f"GHZ6[{frame}]")


def ghz_family_maximum(obs: Observable, starts: int = 24, seed: int = 0) -> tuple[float, PureState]:
    """Maximize <obs> over six-qubit GHZ states: frame axis, relative phase and per-site z rotations."""
    rng = np.random.default_rng(seed)
    best_value, best_params, best_frame = -np.inf, np.zeros(7), "x"

    def negative(params: np.ndarray, frame: Axis) -> float:
        return -expectation(ghz_family_state(params, frame), obs)

    for frame in AXES:
        initial = [np.zeros(7), np.r_[np.pi, np.zeros(6)]]
        initial += [rng.uniform(0, 2 * np.pi, 7) for _ in range(starts)]
        for x0 in initial:
            result = minimize(negative, x0, args=(frame,), method="BFGS")
            if -result.fun > best_value:
                best_value, best_params, best_frame = -result.fun, result.x, frame
    return float(best_value), ghz_family_state(best_params, best_frame)
