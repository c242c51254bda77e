"""Named state constructors: Dicke, GHZ, W and the five-qubit Delta family."""

import numpy as np
from scipy.special import comb

from dickesim.quantum.qcore import AXIS_EIGENVECTORS, kron_all, normalize_global_phase, partial_trace
from dickesim.types import Axis, DickeSpec, MixedState, PureState

KETS: dict[str, np.ndarray] = {
    "H": AXIS_EIGENVECTORS["z"][0],
    "V": AXIS_EIGENVECTORS["z"][1],
    "+": AXIS_EIGENVECTORS["x"][0],
    "-": AXIS_EIGENVECTORS["x"][1],
    "L": AXIS_EIGENVECTORS["y"][0],
    "R": AXIS_EIGENVECTORS["y"][1],
}


def ket(name: str) -> PureState:
    if name not in KETS:
        raise ValueError(f"Unknown polarization ket: {name} (expected one of {', '.join(KETS)})")
    return PureState(KETS[name], label=name)


def product_state(labels: str) -> PureState:
    return PureState(kron_all([KETS[c] for c in labels]), label=labels)


def axis_eigenvectors(axis: Axis) -> tuple[PureState, PureState]:
    first, second = AXIS_EIGENVECTORS[axis]
    return PureState(first), PureState(second)


def dicke(spec: DickeSpec | tuple[int, int]) -> PureState:
    if not isinstance(spec, DickeSpec):
        spec = DickeSpec(*spec)
    dim = 2**spec.n
    weights = np.array([i.bit_count() for i in range(dim)])
    amps = np.where(weights == spec.l, 1.0 / np.sqrt(comb(spec.n, spec.l, exact=True)), 0.0)
    return PureState(amps, label=f"D({spec.n},{spec.l})")


def ghz(n: int, sign: int = 1) -> PureState:
    if n < 2:
        raise ValueError("GHZ states need at least two qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1 / np.sqrt(2)
    amps[-1] = np.sign(sign) / np.sqrt(2)
    return PureState(amps, label=f"GHZ{n}{'+' if sign > 0 else '-'}")


def ghz_in_basis(n: int, sign: int, axis: Axis) -> PureState:
    """(|0>^n + sign |1>^n)/sqrt2 with 0/1 the first/second eigenvector of the axis."""
    first, second = AXIS_EIGENVECTORS[axis]
    amps = (kron_all([first] * n) + np.sign(sign) * kron_all([second] * n)) / np.sqrt(2)
    return PureState(normalize_global_phase(amps), label=f"GHZ{n}{'+' if sign > 0 else '-'}[{axis}]")


def w_state(n: int) -> PureState:
    state = dicke((n, 1))
    return PureState(state.amplitudes, label=f"W{n}")


def delta5(theta: float, phi: float) -> PureState:
    amps = np.cos(theta) * dicke((5, 2)).amplitudes + np.sin(theta) * np.exp(1j * phi) * dicke((5, 3)).amplitudes
    return PureState(normalize_global_phase(amps), label=f"Delta5({theta:.4f},{phi:.4f})")


def analyzer_ket(theta: float, phi: float) -> PureState:
    """cos(theta)|V> + sin(theta) e^{-i phi}|H>: projecting a D(6,3) qubit on it leaves Delta5(theta, phi)."""
    return PureState(np.array([np.sin(theta) * np.exp(-1j * phi), np.cos(theta)]))


def rho5() -> MixedState:
    """Five-qubit state left after losing one photon of D(6,3)."""
    return partial_trace(dicke((6, 3)), {0})


def maximally_mixed(n: int) -> MixedState:
    return MixedState(np.eye(2**n) / 2**n, label=f"1/{2**n}")


NAMED_STATES = {
    "d63": lambda: dicke((6, 3)),
    "d64": lambda: dicke((6, 4)),
    "d62": lambda: dicke((6, 2)),
    "d53": lambda: dicke((5, 3)),
    "d52": lambda: dicke((5, 2)),
    "d42": lambda: dicke((4, 2)),
    "d41": lambda: dicke((4, 1)),
    "w4": lambda: w_state(4),
    "ghz6-": lambda: ghz(6, -1),
    "ghz6+": lambda: ghz(6, 1),
    "ghz4-": lambda: ghz_in_basis(4, -1, "x"),
    "delta5": lambda: delta5(np.pi / 4, np.pi),
}


def named_state(name: str) -> PureState:
    key = name.strip().lower()
    if key not in NAMED_STATES:
        raise ValueError(f"Unknown state: {name} (known: {', '.join(NAMED_STATES)})")
    state = NAMED_STATES[key]()
    return PureState(state.amplitudes, label=key)
