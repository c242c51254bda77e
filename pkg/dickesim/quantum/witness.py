"""Entanglement witnesses, the biseparable-bound optimizer and measurement-setting decompositions."""

import warnings
from collections.abc import Callable, Sequence
from fractions import Fraction
from functools import cache
from itertools import product

import numpy as np
from scipy.special import factorial

from dickesim.errors import ConvergenceWarning, DecompositionError, DimensionMismatchError
from dickesim.quantum.collective import collective_j, j_power, j_squared
from dickesim.quantum.qcore import (
    PAULI,
    State,
    all_bipartitions,
    as_observable,
    expectation,
    is_permutation_symmetric,
    pauli_string_matrix,
    schmidt_spectrum,
)
from dickesim.quantum.states import named_state, product_state
from dickesim.types import AXES, Axis, BisepBound, Bipartition, Observable, PureState, SettingDecomposition, WitnessSpec

J2_ALPHA_6 = 11.0179
PROJECTOR_ALPHA_D63 = 0.6
MOMENTS_OFFSET = 1.5
FIDELITY_BOUND_OFFSET = 0.6
FIDELITY_BOUND_SCALE = 2.5

# c_ij for sum_i sum_j c_ij J_i^(2j); the c-term enters with a plus sign so that D(6,3) evaluates to -1
MOMENT_COEFFICIENTS: dict[Axis, tuple[Fraction, Fraction, Fraction]] = {
    "x": (Fraction(-1, 45), Fraction(1, 36), Fraction(-1, 180)),
    "y": (Fraction(-1, 45), Fraction(1, 36), Fraction(-1, 180)),
    "z": (Fraction(1007, 360), Fraction(-31, 36), Fraction(23, 360)),
}

SEESAW_RESTARTS = 64

Direction = tuple[float, float, float]
SEESAW_TOL = 1e-10
SEESAW_MAX_ITER = 1000


def projector(states: Sequence[PureState]) -> np.ndarray:
    vectors = np.column_stack([s.amplitudes for s in states])
    basis, _ = np.linalg.qr(vectors)
    return basis @ basis.conj().T


def projector_witness(target: PureState, alpha: float) -> Observable:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Projector witness bound must lie in [0, 1], got {alpha}")
    matrix = alpha * np.eye(target.dim) - np.outer(target.amplitudes, target.amplitudes.conj())
    return Observable(matrix, label=f"W_proj({target.label or 'target'})")


def max_bisep_overlap(target: PureState) -> float:
    """Largest squared Schmidt coefficient over every bipartition."""
    return max(schmidt_spectrum(target, cut)[0] for cut in all_bipartitions(target.num_qubits))


def j2_witness(num_qubits: int, alpha: float) -> Observable:
    matrix = alpha * np.eye(2**num_qubits) - j_squared(num_qubits, ("x", "y")).matrix
    return Observable(matrix, label=f"W{num_qubits}({alpha})")


def _seesaw_cut(
    matrix: np.ndarray, cut: Bipartition, rng: np.random.Generator, restarts: int, tol: float, max_iter: int
) -> tuple[float, np.ndarray, np.ndarray, bool]:
    n = cut.num_qubits
    order = list(cut.left) + list(cut.right)
    dl, dr = 2 ** len(cut.left), 2 ** len(cut.right)
    tensor_form = np.transpose(matrix.reshape([2] * (2 * n)), order + [n + q for q in order])
    op = tensor_form.reshape(dl, dr, dl, dr)

    best = (-np.inf, np.zeros(dl, complex), np.zeros(dr, complex), False)
    for _ in range(restarts):
        b = rng.normal(size=dr) + 1j * rng.normal(size=dr)
        b /= np.linalg.norm(b)
        value, converged = -np.inf, False
        for _ in range(max_iter):
            eff_left = np.einsum("iajb,a,b->ij", op, b.conj(), b)
            _, vecs = np.linalg.eigh((eff_left + eff_left.conj().T) / 2)
            a = vecs[:, -1]
            eff_right = np.einsum("iajb,i,j->ab", op, a.conj(), a)
            vals, vecs = np.linalg.eigh((eff_right + eff_right.conj().T) / 2)
            b = vecs[:, -1]
            if abs(vals[-1] - value) < tol:
                value, converged = float(vals[-1]), True
                break
            value = float(vals[-1])
        if value > best[0]:
            best = (value, a, b, converged)
    return best


def _product_in_order(a: np.ndarray, b: np.ndarray, cut: Bipartition) -> PureState:
    n = cut.num_qubits
    order = list(cut.left) + list(cut.right)
    psi = np.kron(a, b).reshape([2] * n)
    return PureState(np.transpose(psi, np.argsort(order)).ravel())


def optimize_bisep_bound(
    obs: Observable | np.ndarray,
    restarts: int = SEESAW_RESTARTS,
    tol: float = SEESAW_TOL,
    max_iter: int = SEESAW_MAX_ITER,
    seed: int = 0,
    cuts: Sequence[Bipartition] | None = None,
    on_cut: Callable[[Bipartition, float], None] | None = None,
) -> BisepBound:
    """Maximum of <a(x)b|O|a(x)b> over all bipartitions by alternating top-eigenvector updates.

    Permutation-symmetric observables are only optimized over one cut per left-size.
    """
    observable = as_observable(obs)
    n = observable.num_qubits
    if n < 2:
        raise DimensionMismatchError("Biseparable bounds need at least two qubits")
    if cuts is None:
        if is_permutation_symmetric(observable):
            cuts = [Bipartition.from_left(list(range(k)), n) for k in range(1, n // 2 + 1)]
        else:
            cuts = all_bipartitions(n)

    rng = np.random.default_rng(seed)
    best: BisepBound | None = None
    for cut in cuts:
        value, a, b, converged = _seesaw_cut(observable.matrix, cut, rng, restarts, tol, max_iter)
        if on_cut is not None:
            on_cut(cut, value)
        if best is None or value > best.value:
            best = BisepBound(value, cut, _product_in_order(a, b, cut), converged, restarts)
    assert best is not None
    if not best.converged:
        warnings.warn(
            f"See-saw on cut {best.bipartition} stopped after {max_iter} iterations (best value {best.value:.10f})",
            ConvergenceWarning,
            stacklevel=2,
        )
    return best


def moments_witness() -> Observable:
    matrix = MOMENTS_OFFSET * np.eye(64, dtype=complex)
    for axis, row in MOMENT_COEFFICIENTS.items():
        for j, coeff in enumerate(row, start=1):
            matrix = matrix + float(coeff) * j_power(6, axis, 2 * j).matrix
    return Observable(matrix, label="W_moments")


def moments_witness_value(moments: dict[tuple[Axis, int], float]) -> float:
    """Witness value from <J_i^(2j)> keyed by (axis, power)."""
    value = MOMENTS_OFFSET
    for axis, row in MOMENT_COEFFICIENTS.items():
        for j, coeff in enumerate(row, start=1):
            value += float(coeff) * moments.get((axis, 2 * j), 0.0)
    return value


def fidelity_bound_from_moments(w_value: float) -> float:
    return FIDELITY_BOUND_OFFSET - w_value / FIDELITY_BOUND_SCALE


def symmetrized_moments(direction: Sequence[float], num_qubits: int) -> list[np.ndarray]:
    """Sym_0..Sym_N for the direction: sums of (n.sigma) placed on every k-subset of sites."""
    nx, ny, nz = direction
    local = nx * PAULI["X"] + ny * PAULI["Y"] + nz * PAULI["Z"]
    ops = [np.ones((1, 1), dtype=complex)]
    for _ in range(num_qubits):
        dim = ops[0].shape[0]
        grown = [np.kron(op, PAULI["I"]) for op in ops] + [np.zeros((2 * dim, 2 * dim), dtype=complex)]
        for k in range(1, len(grown)):
            grown[k] = grown[k] + np.kron(ops[k - 1], local)
        ops = grown
    return ops


@cache
def _pauli_classes(num_qubits: int) -> tuple[tuple[tuple[int, int, int], ...], np.ndarray]:
    classes = [
        (a, b, c)
        for a in range(num_qubits + 1)
        for b in range(num_qubits + 1 - a)
        for c in range(num_qubits + 1 - a - b)
    ]
    weights = np.array(
        [
            factorial(num_qubits) / (factorial(a) * factorial(b) * factorial(c) * factorial(num_qubits - a - b - c))
            for a, b, c in classes
        ]
    )
    return tuple(classes), np.sqrt(weights * 2**num_qubits)


def _class_vector(matrix: np.ndarray, num_qubits: int) -> np.ndarray:
    classes, _ = _pauli_classes(num_qubits)
    out = np.empty(len(classes))
    for i, (a, b, c) in enumerate(classes):
        label = "X" * a + "Y" * b + "Z" * c + "I" * (num_qubits - a - b - c)
        out[i] = np.einsum("ij,ji->", pauli_string_matrix(label), matrix).real / 2**num_qubits
    return out


def _direction_columns(direction: Direction, num_qubits: int) -> np.ndarray:
    # column k: class coordinates of Sym_k(n), nonzero only on classes of weight k
    classes, _ = _pauli_classes(num_qubits)
    cols = np.zeros((len(classes), num_qubits + 1))
    nx, ny, nz = direction
    for i, (a, b, c) in enumerate(classes):
        cols[i, a + b + c] = nx**a * ny**b * nz**c
    return cols


def _ring(theta: float, count: int, span: float, offset: float) -> list[Direction]:
    return [
        (float(np.sin(theta) * np.cos(phi)), float(np.sin(theta) * np.sin(phi)), float(np.cos(theta)))
        for phi in offset + span * np.arange(count) / count
    ]


def _rotation_family(num_qubits: int, offset: float) -> list[Direction]:
    """z, tilted rings of n+1 azimuths over 2pi and an equator of n//2+1 azimuths over pi.

    Tilted rings sum to the azimuthal average of every weight up to n and the equator of every even weight,
    so the family spans all operators that commute with J_z.
    """
    tilted = max(0, -(-num_qubits // 2) - 1)
    family: list[Direction] = [(0.0, 0.0, 1.0)]
    for r in range(1, tilted + 1):
        family += _ring(r * np.pi / (2 * (tilted + 1)), num_qubits + 1, 2 * np.pi, offset)
    family += _ring(np.pi / 2, num_qubits // 2 + 1, np.pi, offset)
    return family


def _dense_family(num_qubits: int) -> list[Direction]:
    # n rings of 2n+1 azimuths inside the open upper hemisphere: unisolvent for every weight up to n
    family: list[Direction] = [(0.0, 0.0, 1.0)]
    for r in range(1, num_qubits + 1):
        family += _ring(r * np.pi / (2 * (num_qubits + 1)), 2 * num_qubits + 1, 2 * np.pi, 0.0)
    return family


def _candidate_families(observable: Observable) -> list[list[Direction]]:
    n = observable.num_qubits
    families = [[(0.0, 0.0, 1.0)]]
    families += [_rotation_family(n, offset) for offset in (0.0, np.pi / (n + 1))]
    jz = collective_j(n, "z").matrix
    if not np.allclose(observable.matrix @ jz, jz @ observable.matrix, atol=1e-10):
        families.append(_dense_family(n))
    return families


def _solve(target: np.ndarray, directions: list[Direction], num_qubits: int) -> tuple[np.ndarray, float]:
    _, row_weights = _pauli_classes(num_qubits)
    system = np.hstack([_direction_columns(d, num_qubits) for d in directions]) * row_weights[:, None]
    rhs = target * row_weights
    coeffs, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = float(np.linalg.norm(system @ coeffs - rhs))
    return coeffs.reshape(len(directions), num_qubits + 1), residual


def _prune(
    target: np.ndarray, directions: list[Direction], num_qubits: int, tol: float, budget: int
) -> tuple[list[Direction], np.ndarray, float]:
    coeffs, residual = _solve(target, directions, num_qubits)
    current = list(directions)
    if residual <= tol:
        # drop settings while the fit stays exact
        changed = True
        while changed and len(current) > 1:
            changed = False
            for index in np.argsort(np.linalg.norm(coeffs, axis=1)):
                trial = current[:index] + current[index + 1 :]
                trial_coeffs, trial_residual = _solve(target, trial, num_qubits)
                if trial_residual <= tol:
                    current, coeffs, residual, changed = trial, trial_coeffs, trial_residual, True
                    break
    # over budget: drop the weakest setting and refit, to report the best residual reachable this way
    while len(current) > budget:
        index = int(np.argmin(np.linalg.norm(coeffs, axis=1)))
        current = current[:index] + current[index + 1 :]
        coeffs, residual = _solve(target, current, num_qubits)
    return current, coeffs, residual


def decompose_settings(
    target: Observable | np.ndarray, max_settings: int, tol: float = 1e-9, label: str | None = None
) -> SettingDecomposition:
    """Write a permutation-symmetric operator as sum_j sum_k c_jk Sym_k(n_j) with at most max_settings directions."""
    observable = as_observable(target)
    if not is_permutation_symmetric(observable):
        raise ValueError("Setting decomposition needs an operator symmetric under qubit permutations")
    if max_settings < 1:
        raise ValueError("At least one measurement setting is required")
    n = observable.num_qubits
    vector = _class_vector(observable.matrix, n)

    best_residual = np.inf
    for family in _candidate_families(observable):
        directions, coeffs, residual = _prune(vector, family, n, tol, max_settings)
        best_residual = min(best_residual, residual)
        if residual > tol or len(directions) > max_settings:
            continue
        decomposition = SettingDecomposition(
            num_qubits=n,
            directions=[tuple(float(x) for x in d) for d in directions],
            coefficients=[[float(c) for c in row] for row in coeffs],
            residual=0.0,
            target=label or observable.label,
        )
        decomposition.residual = float(np.linalg.norm(recombine(decomposition) - observable.matrix))
        if decomposition.residual > tol:
            raise DecompositionError(
                f"Recombined settings miss the target by {decomposition.residual:.3e}", decomposition.residual
            )
        return decomposition
    raise DecompositionError(f"No decomposition with at most {max_settings} settings", best_residual)


def recombine(decomposition: SettingDecomposition) -> np.ndarray:
    total = np.zeros((2**decomposition.num_qubits,) * 2, dtype=complex)
    for direction, row in zip(decomposition.directions, decomposition.coefficients, strict=True):
        for coeff, op in zip(row, symmetrized_moments(direction, decomposition.num_qubits), strict=True):
            total += coeff * op
    return total


def _ghz_two_setting_parts() -> tuple[np.ndarray, np.ndarray]:
    parity = (np.eye(16) - pauli_string_matrix("ZZZZ")) / 2
    population = projector([product_state("++++"), product_state("----")])
    return parity, population


@cache
def ghz_two_setting_bound() -> float:
    parity, population = _ghz_two_setting_parts()
    return optimize_bisep_bound(Observable(parity + population)).value


def ghz_two_setting_witness(alpha: float | None = None) -> Observable:
    """alpha - P_odd(zzzz) - P(|++++>,|---->): two local settings, negative on GHZ4- in the +/- basis."""
    parity, population = _ghz_two_setting_parts()
    bound = ghz_two_setting_bound() if alpha is None else alpha
    return Observable(bound * np.eye(16) - parity - population, label="W_GHZ4")


def subspace_witness(targets: Sequence[PureState], alpha: float | None = None) -> Observable:
    proj = projector(targets)
    bound = optimize_bisep_bound(Observable(proj)).value if alpha is None else alpha
    return Observable(bound * np.eye(proj.shape[0]) - proj, label="W_subspace")


@cache
def persistency_bound() -> float:
    """Largest biseparable weight in span{D(5,2), D(5,3)}."""
    return optimize_bisep_bound(Observable(projector([named_state("d52"), named_state("d53")]))).value


def sample_biseparable_min(obs: Observable | np.ndarray, samples: int = 2000, seed: int = 0) -> float:
    """Minimum expectation over random pure states that are product across a random bipartition."""
    observable = as_observable(obs)
    n = observable.num_qubits
    cuts = all_bipartitions(n)
    rng = np.random.default_rng(seed)
    lowest = np.inf
    for _ in range(samples):
        cut = cuts[rng.integers(len(cuts))]
        a = rng.normal(size=2 ** len(cut.left)) + 1j * rng.normal(size=2 ** len(cut.left))
        b = rng.normal(size=2 ** len(cut.right)) + 1j * rng.normal(size=2 ** len(cut.right))
        state = _product_in_order(a / np.linalg.norm(a), b / np.linalg.norm(b), cut)
        lowest = min(lowest, expectation(state, observable))
    return float(lowest)


def witness_catalog() -> dict[str, WitnessSpec]:
    moments = tuple(MOMENT_COEFFICIENTS[axis] for axis in AXES)
    specs = [
        WitnessSpec("projector", PROJECTOR_ALPHA_D63, target="d63", name="generic-d63"),
        WitnessSpec("j2", J2_ALPHA_6, name="j2-6", settings=["xxxxxx", "yyyyyy"]),
        WitnessSpec(
            "moments", MOMENTS_OFFSET, coefficients=moments, name="moments-6", settings=["xxxxxx", "yyyyyy", "zzzzzz"]
        ),
        WitnessSpec(
            "ghz-two-setting",
            ghz_two_setting_bound(),
            target="ghz4-",
            name="ghz4-two-setting",
            num_qubits=4,
            settings=["xxxx", "zzzz"],
        ),
        WitnessSpec("subspace", persistency_bound(), target="d52+d53", name="persistency-rho5", num_qubits=5),
    ]
    return {spec.name: spec for spec in specs if spec.name}


def witness_observable(spec: WitnessSpec) -> Observable:
    match spec.kind:
        case "projector":
            return projector_witness(named_state(spec.target or "d63"), spec.alpha)
        case "j2":
            return j2_witness(spec.num_qubits, spec.alpha)
        case "moments":
            return moments_witness()
        case "ghz-two-setting":
            return ghz_two_setting_witness(spec.alpha)
        case "subspace":
            targets = [named_state(name) for name in (spec.target or "").split("+")]
            return subspace_witness(targets, spec.alpha)
    raise ValueError(f"Unknown witness kind: {spec.kind}")


def evaluate_witness(spec: WitnessSpec, state: State) -> float:
    return expectation(state, witness_observable(spec))


def state_moments(state: State) -> dict[tuple[Axis, int], float]:
    return {(axis, p): expectation(state, j_power(state.num_qubits, axis, p)) for axis, p in product(AXES, (2, 4, 6))}
