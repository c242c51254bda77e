"""Type definitions for dickesim."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np

from dickesim.errors import CapacityError, ConfigError, DimensionMismatchError, NotHermitianError

MAX_QUBITS = 8
STATE_TOL = 1e-10
PSD_TOL = 1e-8

Axis = Literal["x", "y", "z"]
AXES: tuple[Axis, ...] = ("x", "y", "z")
MODES = ("a", "b", "c", "d", "e", "f")
POLARIZATIONS = ("H", "V")


def _num_qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise DimensionMismatchError(f"Dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceed the limit of {MAX_QUBITS}")
    return n


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        amps = _frozen(np.ravel(self.amplitudes))
        _num_qubits_for(amps.size)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > STATE_TOL:
            raise ValueError(f"State is not normalized (squared norm {norm:.12f})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def density(self) -> "MixedState":
        return MixedState(np.outer(self.amplitudes, self.amplitudes.conj()), label=self.label)


@dataclass(frozen=True, eq=False)
class MixedState:
    matrix: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"Density matrix must be square, got shape {mat.shape}")
        _num_qubits_for(mat.shape[0])
        if np.max(np.abs(mat - mat.conj().T)) > STATE_TOL:
            raise NotHermitianError("Density matrix is not Hermitian")
        trace = np.trace(mat).real
        if abs(trace - 1.0) > STATE_TOL:
            raise ValueError(f"Density matrix trace is {trace:.12f}, expected 1")
        min_eig = float(np.linalg.eigvalsh(mat).min())
        if min_eig < -PSD_TOL:
            raise ValueError(f"Density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"Observable must be square, got shape {mat.shape}")
        _num_qubits_for(mat.shape[0])
        if np.max(np.abs(mat - mat.conj().T)) > STATE_TOL:
            raise NotHermitianError(f"Observable {self.label or ''} is not Hermitian".replace("  ", " "))
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self.matrix.shape[0])

    def __add__(self, other: "Observable") -> "Observable":
        return Observable(self.matrix + other.matrix)

    def __sub__(self, other: "Observable") -> "Observable":
        return Observable(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> "Observable":
        return Observable(self.matrix * scalar, label=self.label)

    __rmul__ = __mul__

    def __matmul__(self, other: "Observable") -> np.ndarray:
        return self.matrix @ other.matrix


@dataclass(frozen=True)
class Bipartition:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self) -> None:
        left, right = tuple(sorted(self.left)), tuple(sorted(self.right))
        if not left or not right:
            raise ValueError("Both sides of a bipartition must be nonempty")
        if set(left) & set(right):
            raise ValueError(f"Bipartition sides overlap: {left} | {right}")
        if set(left) | set(right) != set(range(len(left) + len(right))):
            raise ValueError(f"Bipartition {left} | {right} does not cover all qubits")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_left(cls, left: tuple[int, ...] | list[int], num_qubits: int) -> "Bipartition":
        right = tuple(q for q in range(num_qubits) if q not in left)
        return cls(tuple(left), right)

    @property
    def num_qubits(self) -> int:
        return len(self.left) + len(self.right)

    def __str__(self) -> str:
        return f"{''.join(map(str, self.left))}|{''.join(map(str, self.right))}"


@dataclass(frozen=True)
class DickeSpec:
    n: int
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise CapacityError(f"Dicke state on {self.n} qubits is outside 1..{MAX_QUBITS}")
        if not 0 <= self.l <= self.n:
            raise ValueError(f"Excitation number {self.l} out of range 0..{self.n}")


WitnessKind = Literal["projector", "j2", "moments", "ghz-two-setting", "subspace"]


@dataclass
class WitnessSpec:
    kind: WitnessKind
    alpha: float
    coefficients: tuple[tuple[Fraction, ...], ...] | None = None
    target: str | None = None
    name: str | None = None
    num_qubits: int = 6
    settings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not np.isfinite(self.alpha):
            raise ValueError("Witness bound alpha must be finite")


@dataclass
class BisepBound:
    value: float
    bipartition: Bipartition
    state: PureState
    converged: bool = True
    restarts: int = 0


@dataclass
class SettingDecomposition:
    num_qubits: int
    directions: list[tuple[float, float, float]]
    coefficients: list[list[float]]
    residual: float
    target: str | None = None

    def __post_init__(self) -> None:
        if len(self.directions) != len(self.coefficients):
            raise ValueError("One coefficient list per setting direction is required")
        for direction in self.directions:
            if abs(float(np.linalg.norm(direction)) - 1.0) > 1e-12:
                raise ValueError(f"Setting direction {direction} is not a unit vector")
        for row in self.coefficients:
            if len(row) != self.num_qubits + 1:
                raise ValueError(f"Expected {self.num_qubits + 1} moment coefficients per setting, got {len(row)}")

    @property
    def num_settings(self) -> int:
        return len(self.directions)


@dataclass
class ModeOccupation:
    counts: dict[tuple[str, str], int]
    amplitude: complex = 1.0

    def __post_init__(self) -> None:
        if any(n < 0 for n in self.counts.values()):
            raise ValueError("Photon counts must be nonnegative")
        if self.total_photons > MAX_QUBITS:
            raise CapacityError(f"{self.total_photons} photons exceed the budget of {MAX_QUBITS}")
        if not np.isfinite(self.amplitude):
            raise ValueError("Occupation amplitude must be finite")

    @property
    def total_photons(self) -> int:
        return sum(self.counts.values())

    def count(self, polarization: str, mode: str = "src") -> int:
        return self.counts.get((mode, polarization), 0)


@dataclass(frozen=True)
class Leaf:
    mode: str


@dataclass(frozen=True)
class Splitter:
    name: str
    ratio: float
    first: "Splitter | Leaf"
    second: "Splitter | Leaf"

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"Splitting ratio of {self.name} must lie in [0, 1], got {self.ratio}")


@dataclass(frozen=True)
class SplitterTree:
    root: Splitter

    def leaves(self) -> list[str]:
        found: list[str] = []

        def walk(node: Splitter | Leaf) -> None:
            if isinstance(node, Leaf):
                found.append(node.mode)
            else:
                walk(node.first)
                walk(node.second)

        walk(self.root)
        return found

    def splitters(self) -> list[Splitter]:
        found: list[Splitter] = []

        def walk(node: Splitter | Leaf) -> None:
            if isinstance(node, Splitter):
                found.append(node)
                walk(node.first)
                walk(node.second)

        walk(self.root)
        return found


@dataclass
class SourceConfig:
    order_weights: dict[int, float] = field(default_factory=lambda: {3: 1.0, 4: 0.0})
    efficiency: float = 1.0

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.order_weights.values()):
            raise ConfigError("order weights must be nonnegative", "source.order_weights")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError(f"efficiency {self.efficiency} outside [0, 1]", "source.efficiency")


Basis = str | tuple[float, float]


@dataclass(frozen=True)
class LocalSetting:
    bases: tuple[Basis, ...]

    def __post_init__(self) -> None:
        for basis in self.bases:
            if isinstance(basis, str):
                if basis not in AXES:
                    raise ValueError(f"Unknown measurement axis: {basis}")
            elif len(basis) != 2 or not all(np.isfinite(basis)):
                raise ValueError(f"Analyzer angles must be a finite (theta, phi) pair, got {basis}")

    @property
    def num_sites(self) -> int:
        return len(self.bases)

    @property
    def label(self) -> str:
        if all(isinstance(b, str) for b in self.bases):
            return "".join(str(b) for b in self.bases)
        return ",".join(b if isinstance(b, str) else f"({b[0]:.6f},{b[1]:.6f})" for b in self.bases)


@dataclass
class CountHistogram:
    setting: LocalSetting
    counts: np.ndarray
    duration: float = 0.0
    efficiencies: np.ndarray = field(default_factory=lambda: np.ones(12))
    seed: int | None = None
    exact: bool = False
    label: str | None = None

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=float)
        self.efficiencies = np.asarray(self.efficiencies, dtype=float)
        expected = 2 ** self.setting.num_sites
        if self.counts.shape != (expected,):
            raise ValueError(f"Histogram needs {expected} bins, got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("Counts must be nonnegative")
        if not self.exact and np.any(self.counts != np.round(self.counts)):
            raise ValueError("Sampled histograms must hold integer counts")
        if self.efficiencies.shape != (2 * self.setting.num_sites,):
            raise ValueError(f"Expected {2 * self.setting.num_sites} detector efficiencies")
        if np.any(self.efficiencies <= 0):
            raise ValueError("Detector efficiencies must be positive")
        if self.label is None:
            self.label = self.setting.label

    @property
    def total(self) -> float:
        return float(self.counts.sum())


@dataclass
class Estimate:
    value: float
    sigma: float
    inputs: tuple[str, ...] = ()
    name: str | None = None

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError("Estimate sigma must be nonnegative")

    def __str__(self) -> str:
        return f"{self.value:.4f} ± {self.sigma:.4f}"


@dataclass
class RunConfig:
    source: SourceConfig = field(default_factory=SourceConfig)
    tree: SplitterTree | None = None
    settings: list[str] = field(default_factory=lambda: ["zzzzzz", "xxxxxx", "yyyyyy"])
    duration_hours: float = 31.5
    rate_per_minute: float = 3.7
    seed: int = 0
    output_dir: str = "runs"
    efficiencies: list[float] = field(default_factory=lambda: [1.0] * 12)
    efficiency_sigmas: list[float] = field(default_factory=lambda: [0.0] * 12)
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rate_per_minute <= 0:
            raise ConfigError("rate must be positive", "rate_per_minute")
        if self.duration_hours <= 0:
            raise ConfigError("duration must be positive", "duration_hours")
