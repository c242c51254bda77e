"""Dense linear algebra for small multiqubit states.

Basis ordering: qubit 0 is the most significant bit of the computational index, |H> = |0>, |V> = |1>.
"""

from collections.abc import Sequence
from itertools import product

import numpy as np

from dickesim.errors import CapacityError, DegenerateOutcomeError, DimensionMismatchError, NotHermitianError
from dickesim.types import MAX_QUBITS, Axis, Bipartition, MixedState, Observable, PureState

IMAG_TOL = 1e-10
DEGENERATE_TOL = 1e-12

PAULI: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_SQRT_HALF = 1 / np.sqrt(2)

# (first, second) eigenvectors; first is the +1 eigenvector and maps to outcome bit 0
AXIS_EIGENVECTORS: dict[Axis, tuple[np.ndarray, np.ndarray]] = {
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "x": (np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex), np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex)),
    "y": (np.array([_SQRT_HALF, 1j * _SQRT_HALF]), np.array([_SQRT_HALF, -1j * _SQRT_HALF])),
}

State = PureState | MixedState


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    if not factors:
        raise ValueError("Kronecker product needs at least one factor")
    out = np.array([[1.0 + 0j]]) if factors[0].ndim == 2 else np.array([1.0 + 0j])
    for factor in factors:
        out = np.kron(out, factor)
    return out


def single_site(op: np.ndarray, site: int, num_qubits: int) -> np.ndarray:
    factors = [PAULI["I"]] * num_qubits
    factors[site] = op
    return kron_all(factors)


def pauli_string_matrix(label: str) -> np.ndarray:
    return kron_all([PAULI[c] for c in label.upper()])


def as_observable(obs: Observable | np.ndarray) -> Observable:
    return obs if isinstance(obs, Observable) else Observable(obs)


def as_mixed(state: State) -> MixedState:
    return state.density() if isinstance(state, PureState) else state


def normalize_global_phase(amplitudes: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    amps = np.asarray(amplitudes, dtype=complex)
    nonzero = np.flatnonzero(np.abs(amps) > tol)
    if nonzero.size == 0:
        return amps
    lead = amps[nonzero[0]]
    return amps * (abs(lead) / lead)


def equal_up_to_phase(a: PureState | np.ndarray, b: PureState | np.ndarray, tol: float = 1e-10) -> bool:
    va = a.amplitudes if isinstance(a, PureState) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, PureState) else np.asarray(b)
    if va.shape != vb.shape:
        return False
    return bool(abs(abs(np.vdot(va, vb)) - 1.0) <= tol)


def tensor(factors: Sequence[PureState]) -> PureState:
    total = sum(f.num_qubits for f in factors)
    if total > MAX_QUBITS:
        raise CapacityError(f"Tensor product of {total} qubits exceeds the limit of {MAX_QUBITS}")
    return PureState(kron_all([f.amplitudes for f in factors]))


def expectation(state: State, obs: Observable | np.ndarray) -> float:
    observable = as_observable(obs)
    if observable.num_qubits != state.num_qubits:
        raise DimensionMismatchError(
            f"Observable acts on {observable.num_qubits} qubits, state has {state.num_qubits}"
        )
    if isinstance(state, PureState):
        value = np.vdot(state.amplitudes, observable.matrix @ state.amplitudes)
    else:
        value = np.einsum("ij,ji->", observable.matrix, state.matrix)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise NotHermitianError(f"Expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)


def fidelity_with_pure(rho: State, target: PureState) -> float:
    if rho.num_qubits != target.num_qubits:
        raise DimensionMismatchError(f"State has {rho.num_qubits} qubits, target has {target.num_qubits}")
    if isinstance(rho, PureState):
        return float(abs(np.vdot(target.amplitudes, rho.amplitudes)) ** 2)
    value = np.vdot(target.amplitudes, rho.matrix @ target.amplitudes).real
    return float(np.clip(value, 0.0, 1.0))


def project_qubit(state: PureState, qubit: int, direction: PureState) -> tuple[PureState, float]:
    n = state.num_qubits
    if n < 2:
        raise CapacityError("Projecting the only qubit would leave an empty state")
    if not 0 <= qubit < n:
        raise IndexError(f"Qubit {qubit} out of range for {n} qubits")
    if direction.num_qubits != 1:
        raise DimensionMismatchError("Projection direction must be a single-qubit state")
    psi = state.amplitudes.reshape([2] * n)
    reduced = np.tensordot(direction.amplitudes.conj(), psi, axes=([0], [qubit])).ravel()
    probability = float(np.vdot(reduced, reduced).real)
    if probability <= DEGENERATE_TOL:
        raise DegenerateOutcomeError(f"Projection of qubit {qubit} has zero probability")
    reduced = normalize_global_phase(reduced / np.sqrt(probability))
    return PureState(reduced), probability


def partial_trace(state: State, drop: set[int] | Sequence[int]) -> MixedState:
    n = state.num_qubits
    dropped = sorted(set(drop))
    if not dropped:
        raise ValueError("Nothing to trace out")
    if any(not 0 <= q < n for q in dropped):
        raise IndexError(f"Qubits {dropped} out of range for {n} qubits")
    keep = [q for q in range(n) if q not in dropped]
    if not keep:
        raise ValueError("Cannot trace out every qubit")
    dk, dd = 2 ** len(keep), 2 ** len(dropped)
    if isinstance(state, PureState):
        psi = np.transpose(state.amplitudes.reshape([2] * n), keep + dropped).reshape(dk, dd)
        reduced = psi @ psi.conj().T
    else:
        rho = state.matrix.reshape([2] * (2 * n))
        order = keep + dropped + [n + q for q in keep] + [n + q for q in dropped]
        rho = np.transpose(rho, order).reshape(dk, dd, dk, dd)
        reduced = np.einsum("ijkj->ik", rho)
    return MixedState((reduced + reduced.conj().T) / 2)


def schmidt_spectrum(state: PureState, cut: Bipartition, tol: float = 1e-12) -> list[float]:
    if cut.num_qubits != state.num_qubits:
        raise DimensionMismatchError(f"Bipartition covers {cut.num_qubits} qubits, state has {state.num_qubits}")
    order = list(cut.left) + list(cut.right)
    psi = np.transpose(state.amplitudes.reshape([2] * state.num_qubits), order)
    singular = np.linalg.svd(psi.reshape(2 ** len(cut.left), -1), compute_uv=False)
    weights = sorted((float(s * s) for s in singular), reverse=True)
    return [w for w in weights if w > tol]


def all_bipartitions(num_qubits: int) -> list[Bipartition]:
    """One representative per unordered bipartition; qubit 0 always sits on the left."""
    cuts: list[Bipartition] = []
    for mask in range(2 ** (num_qubits - 1) - 1):
        left = [0] + [q for q in range(1, num_qubits) if mask >> (q - 1) & 1]
        cuts.append(Bipartition.from_left(left, num_qubits))
    return sorted(cuts, key=lambda c: (len(c.left), c.left))


def apply_local(state: State, unitaries: Sequence[np.ndarray]) -> State:
    n = state.num_qubits
    if len(unitaries) != n:
        raise DimensionMismatchError(f"Need {n} single-qubit unitaries, got {len(unitaries)}")
    if isinstance(state, MixedState):
        u = kron_all(list(unitaries))
        return MixedState(u @ state.matrix @ u.conj().T, label=state.label)
    psi = state.amplitudes.reshape([2] * n)
    for qubit, u in enumerate(unitaries):
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [qubit])), 0, qubit)
    return PureState(psi.ravel(), label=state.label)


def basis_change(axis: Axis) -> np.ndarray:
    """Unitary whose rows are the bras of the axis eigenvectors."""
    first, second = AXIS_EIGENVECTORS[axis]
    return np.vstack([first.conj(), second.conj()])


def rotate_all(state: State, axis: Axis) -> State:
    return apply_local(state, [basis_change(axis)] * state.num_qubits)


def permute_operator(matrix: np.ndarray, order: Sequence[int]) -> np.ndarray:
    n = len(order)
    tensor_form = matrix.reshape([2] * (2 * n))
    axes = list(order) + [n + q for q in order]
    return np.transpose(tensor_form, axes).reshape(matrix.shape)


def is_permutation_symmetric(obs: Observable | np.ndarray, tol: float = 1e-10) -> bool:
    matrix = as_observable(obs).matrix
    n = int(np.log2(matrix.shape[0]))
    for q in range(n - 1):
        order = list(range(n))
        order[q], order[q + 1] = order[q + 1], order[q]
        if np.max(np.abs(permute_operator(matrix, order) - matrix)) > tol:
            return False
    return True


def pauli_decompose(matrix: np.ndarray, tol: float = 1e-12) -> dict[str, float]:
    """Coefficients c_P with matrix = sum_P c_P P over Pauli strings P."""
    n = int(np.log2(matrix.shape[0]))
    basis = np.stack([PAULI[c] for c in "IXYZ"])
    coeffs = matrix.reshape([2] * (2 * n))
    # contract site by site: tr(sigma_a M) over the row/column pair of each qubit
    for remaining in range(n, 0, -1):
        coeffs = np.tensordot(basis, coeffs, axes=([1, 2], [remaining, 0]))
        coeffs = np.moveaxis(coeffs, 0, -1)
    coeffs = coeffs.reshape(-1) / 2**n
    out: dict[str, float] = {}
    for index, label in enumerate(product("IXYZ", repeat=n)):
        value = coeffs[index]
        if abs(value) > tol:
            out["".join(label)] = float(value.real)
    return out
