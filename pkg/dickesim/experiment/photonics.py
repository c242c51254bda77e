"""Bosonic model of the SPDC source, the splitter tree, photon loss and sixfold post-selection.

Polarization-independent splitters send a_p^dagger to sum_m t_m a_{m,p}^dagger. Each photon then survives
with probability eta; lost photons end in environment modes labelled by (mode, polarization), so
configurations with different losses add incoherently. A mode registers a qubit when exactly one of its
two polarization detectors fires.
"""

from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import factorial

from dickesim.errors import CapacityError, DegenerateOutcomeError
from dickesim.quantum.qcore import fidelity_with_pure
from dickesim.quantum.states import dicke
from dickesim.types import MODES, Leaf, MixedState, ModeOccupation, SourceConfig, Splitter, SplitterTree

MAX_ORDER = 4
DEFAULT_RATIO = 0.58
DEFAULT_LAST_RATIO = 0.52
ZERO_PROBABILITY = 1e-15


def spdc_term(order: int) -> ModeOccupation:
    """Order-q emission: q horizontally and q vertically polarized photons in the source mode."""
    if order > MAX_ORDER:
        raise CapacityError(f"SPDC order {order} exceeds the photon budget (max order {MAX_ORDER})")
    if order < 1:
        raise ValueError(f"SPDC order must be at least 1, got {order}")
    return ModeOccupation({("src", "H"): order, ("src", "V"): order})


def default_tree(ratio: float = DEFAULT_RATIO, last_ratio: float = DEFAULT_LAST_RATIO) -> SplitterTree:
    arm_a = Splitter("BS2", ratio, Splitter("BS4", ratio, Leaf("b"), Leaf("c")), Leaf("a"))
    arm_b = Splitter("BS3", ratio, Splitter("BS5", last_ratio, Leaf("e"), Leaf("f")), Leaf("d"))
    return SplitterTree(Splitter("BS1", ratio, arm_a, arm_b))


def symmetric_tree() -> SplitterTree:
    """Same wiring as default_tree with ratios giving every leaf weight 1/6."""
    arm_a = Splitter("BS2", 2 / 3, Splitter("BS4", 0.5, Leaf("b"), Leaf("c")), Leaf("a"))
    arm_b = Splitter("BS3", 2 / 3, Splitter("BS5", 0.5, Leaf("e"), Leaf("f")), Leaf("d"))
    return SplitterTree(Splitter("BS1", 0.5, arm_a, arm_b))


def leaf_amplitudes(tree: SplitterTree) -> np.ndarray:
    """Amplitudes t_a..t_f: products of square-rooted branch ratios along each path."""
    leaves = tree.leaves()
    if sorted(leaves) != sorted(MODES) or len(leaves) != len(MODES):
        raise ValueError(f"Splitter tree must end in each of the modes {', '.join(MODES)} exactly once, got {leaves}")
    amplitudes: dict[str, float] = {}

    def walk(node: Splitter | Leaf, amp: float) -> None:
        if isinstance(node, Leaf):
            amplitudes[node.mode] = amp
            return
        walk(node.first, amp * np.sqrt(node.ratio))
        walk(node.second, amp * np.sqrt(1.0 - node.ratio))

    walk(tree.root, 1.0)
    return np.array([amplitudes[m] for m in MODES])


def sixfold_probability_closed_form(tree: SplitterTree) -> float:
    """Third-order post-selection probability 720 prod |t_m|^2 at unit efficiency."""
    return float(720 * np.prod(leaf_amplitudes(tree) ** 2))


@dataclass(frozen=True)
class _Branch:
    survived: tuple[int, ...]
    lost: tuple[int, ...]
    amplitude: float

    @property
    def support(self) -> int:
        return sum(1 << (len(self.survived) - 1 - m) for m, k in enumerate(self.survived) if k)


def _distributions(total: int, slots: int) -> Iterator[tuple[int, ...]]:
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _distributions(total - first, slots - 1):
            yield (first, *rest)


def _branches(photons: int, t: np.ndarray, eta: float) -> list[_Branch]:
    """All (survived, lost) splits of one polarization's photons over the modes."""
    out = []
    modes = len(t)
    for split in _distributions(photons, 2 * modes):
        survived, lost = split[:modes], split[modes:]
        if eta == 1.0 and any(lost) or eta == 0.0 and any(survived):
            continue
        amp = np.sqrt(factorial(photons))
        for k, lo, tm in zip(survived, lost, t, strict=True):
            amp *= tm ** (k + lo) * eta ** (k / 2) * (1 - eta) ** (lo / 2) / np.sqrt(factorial(k) * factorial(lo))
        if amp != 0.0:
            out.append(_Branch(survived, lost, float(amp)))
    return out


def postselect_sixfold(source: ModeOccupation, tree: SplitterTree, eta: float = 1.0) -> tuple[MixedState, float]:
    """Conditional six-qubit state and probability of one registered qubit in every mode."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"Efficiency {eta} outside [0, 1]")
    if source.total_photons not in (6, 8):
        raise ValueError(f"Sixfold post-selection needs 6 or 8 source photons, got {source.total_photons}")
    t = leaf_amplitudes(tree)
    n_modes = len(t)
    full = (1 << n_modes) - 1

    h_branches = _branches(source.count("H"), t, eta)
    v_by_support: dict[int, list[_Branch]] = defaultdict(list)
    for branch in _branches(source.count("V"), t, eta):
        v_by_support[branch.support].append(branch)

    # environment state and per-mode detected photon numbers fix the orthogonal sector
    sectors: dict[tuple, np.ndarray] = {}
    for h in h_branches:
        for v in v_by_support.get(full ^ h.support, []):
            totals = tuple(a + b for a, b in zip(h.survived, v.survived, strict=True))
            key = (h.lost, v.lost, totals)
            if key not in sectors:
                sectors[key] = np.zeros(2**n_modes, dtype=complex)
            sectors[key][v.support] += source.amplitude * h.amplitude * v.amplitude

    rho = np.zeros((2**n_modes, 2**n_modes), dtype=complex)
    for vector in sectors.values():
        rho += np.outer(vector, vector.conj())
    probability = float(np.trace(rho).real)
    if probability <= ZERO_PROBABILITY:
        raise DegenerateOutcomeError("Sixfold post-selection has zero probability")
    return MixedState(rho / probability, label=f"q{source.count('H')}"), probability


def order_contributions(config: SourceConfig, tree: SplitterTree) -> dict[int, tuple[MixedState, float]]:
    """Conditional state and post-selection probability for each order with nonzero weight."""
    out = {}
    for order, weight in sorted(config.order_weights.items()):
        if weight <= 0:
            continue
        try:
            out[order] = postselect_sixfold(spdc_term(order), tree, config.efficiency)
        except DegenerateOutcomeError:
            continue
    return out


def source_state(config: SourceConfig, tree: SplitterTree) -> MixedState:
    """Mixture of the post-selected orders weighted by order weight times post-selection probability."""
    contributions = order_contributions(config, tree)
    total = sum(config.order_weights[q] * p for q, (_, p) in contributions.items())
    if not contributions or total <= ZERO_PROBABILITY:
        raise DegenerateOutcomeError("No SPDC order contributes to sixfold coincidences")
    matrix = sum(config.order_weights[q] * p * rho.matrix for q, (rho, p) in contributions.items()) / total
    return MixedState(matrix, label="source")


def source_fidelity(config: SourceConfig, tree: SplitterTree) -> float:
    return fidelity_with_pure(source_state(config, tree), dicke((6, 3)))


def calibrate_fourth_order_weight(target_fidelity: float, tree: SplitterTree, eta: float = 1.0) -> float:
    """Fourth-order weight (third order at weight 1) whose mixture has the target D(6,3) fidelity."""
    target = dicke((6, 3))
    rho3, p3 = postselect_sixfold(spdc_term(3), tree, eta)
    rho4, p4 = postselect_sixfold(spdc_term(4), tree, eta)
    f3, f4 = fidelity_with_pure(rho3, target), fidelity_with_pure(rho4, target)
    if not min(f3, f4) < target_fidelity <= max(f3, f4):
        raise ValueError(f"Target fidelity {target_fidelity} outside the reachable range ({f4:.4f}, {f3:.4f}]")

    def mismatch(log_weight: float) -> float:
        w = np.exp(log_weight)
        return (p3 * f3 + w * p4 * f4) / (p3 + w * p4) - target_fidelity

    if abs(mismatch(-60.0)) < 1e-15:
        return 0.0
    upper = 0.0
    while mismatch(upper) > 0 and upper < 600.0:
        upper += 10.0
    return float(np.exp(brentq(mismatch, -60.0, upper, xtol=1e-12)))
