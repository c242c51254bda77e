"""Tests for named state constructors."""

import numpy as np
import pytest

from dickesim.errors import CapacityError
from dickesim.quantum.qcore import equal_up_to_phase, project_qubit, rotate_all
from dickesim.quantum.states import (
    NAMED_STATES,
    analyzer_ket,
    axis_eigenvectors,
    delta5,
    dicke,
    ghz,
    ghz_in_basis,
    ket,
    named_state,
    product_state,
    rho5,
    w_state,
)
from dickesim.types import PureState

ORTHOGONAL = {"H": "V", "V": "H", "+": "-", "-": "+", "L": "R", "R": "L"}


def _basis_form(sign: int) -> np.ndarray:
    """sqrt(5/8) GHZ(sign) + sqrt(3/16) (D(6,4) + sign D(6,2))."""
    return np.sqrt(5 / 8) * ghz(6, sign).amplitudes + np.sqrt(3 / 16) * (
        dicke((6, 4)).amplitudes + sign * dicke((6, 2)).amplitudes
    )


class TestDicke:
    def test_d63_has_twenty_equal_amplitudes(self, d63: PureState) -> None:
        nonzero = d63.amplitudes[np.abs(d63.amplitudes) > 0]
        assert nonzero.size == 20
        np.testing.assert_allclose(nonzero, 1 / np.sqrt(20))

    def test_support_has_three_excitations(self, d63: PureState) -> None:
        support = np.flatnonzero(np.abs(d63.amplitudes) > 0)
        assert all(int(i).bit_count() == 3 for i in support)

    def test_out_of_range(self) -> None:
        with pytest.raises(ValueError):
            dicke((4, 5))
        with pytest.raises(CapacityError):
            dicke((9, 2))

    def test_w_state_is_single_excitation(self) -> None:
        np.testing.assert_allclose(w_state(4).amplitudes, dicke((4, 1)).amplitudes)


class TestBasisIdentities:
    def test_d63_in_x_basis(self, d63: PureState) -> None:
        rotated = rotate_all(d63, "x")
        assert equal_up_to_phase(rotated, _basis_form(-1))

    def test_d63_in_y_basis_matches_up_to_phase(self, d63: PureState) -> None:
        rotated = rotate_all(d63, "y")
        assert equal_up_to_phase(rotated, _basis_form(-1))
        assert abs(np.vdot(_basis_form(-1), rotated.amplitudes) - 1j) < 1e-10


class TestGHZ:
    def test_ghz_amplitudes(self) -> None:
        state = ghz(6, -1)
        assert state.amplitudes[0] == pytest.approx(1 / np.sqrt(2))
        assert state.amplitudes[-1] == pytest.approx(-1 / np.sqrt(2))

    def test_ghz4_minus_in_x_basis(self) -> None:
        expected = (product_state("++++").amplitudes - product_state("----").amplitudes) / np.sqrt(2)
        assert equal_up_to_phase(ghz_in_basis(4, -1, "x"), expected)

    def test_ghz_needs_two_qubits(self) -> None:
        with pytest.raises(ValueError):
            ghz(1)


class TestKets:
    def test_circular_kets(self) -> None:
        np.testing.assert_allclose(ket("L").amplitudes, np.array([1, 1j]) / np.sqrt(2))
        np.testing.assert_allclose(ket("R").amplitudes, np.array([1, -1j]) / np.sqrt(2))

    def test_first_eigenvector_is_plus_one(self) -> None:
        for axis, pauli in (("x", np.array([[0, 1], [1, 0]])), ("y", np.array([[0, -1j], [1j, 0]]))):
            first, second = axis_eigenvectors(axis)  # type: ignore[arg-type]
            np.testing.assert_allclose(pauli @ first.amplitudes, first.amplitudes, atol=1e-12)
            np.testing.assert_allclose(pauli @ second.amplitudes, -second.amplitudes, atol=1e-12)

    def test_unknown_ket(self) -> None:
        with pytest.raises(ValueError):
            ket("Q")


class TestProjectedStates:
    def test_analyzer_projection_gives_delta5(self, d63: PureState) -> None:
        theta, phi = np.pi / 4, np.pi
        reduced, probability = project_qubit(d63, 0, analyzer_ket(theta, phi))
        assert probability == pytest.approx(0.5)
        assert equal_up_to_phase(reduced, delta5(theta, phi))

    def test_h_projection_gives_d53(self, d63: PureState) -> None:
        reduced, _ = project_qubit(d63, 0, ket("H"))
        assert equal_up_to_phase(reduced, dicke((5, 3)))

    def test_rho5_is_equal_mixture(self) -> None:
        expected = 0.5 * (dicke((5, 2)).density().matrix + dicke((5, 3)).density().matrix)
        np.testing.assert_allclose(rho5().matrix, expected, atol=1e-12)



def _project_leading(state: PureState, kets: list[PureState]) -> tuple[np.ndarray, float]:
    """Remainder after projecting the leading qubits and its probability, summed basis state by basis state."""
    k = len(kets)
    rest = state.num_qubits - k
    out = np.zeros(2**rest, dtype=complex)
    for index, amplitude in enumerate(state.amplitudes):
        lead, tail = divmod(index, 2**rest)
        weight = 1.0 + 0j
        for position, single in enumerate(kets):
            weight *= np.conj(single.amplitudes[(lead >> (k - 1 - position)) & 1])
        out[tail] += weight * amplitude
    probability = float(np.vdot(out, out).real)
    return out / np.sqrt(probability), probability


def _project_chain(state: PureState, kets: list[PureState]) -> tuple[PureState, float]:
    total = 1.0
    for single in kets:
        state, probability = project_qubit(state, 0, single)
        total *= probability
    return state, total


class TestProjectionChains:
    @pytest.mark.parametrize(
        ("outcomes", "expected", "probability"),
        [
            ("VH", dicke((4, 2)), 0.3),
            ("VV", dicke((4, 1)), 0.2),
            ("RL", ghz_in_basis(4, -1, "x"), 0.1),
        ],
    )
    def test_two_photon_chain(
        self, d63: PureState, outcomes: str, expected: PureState, probability: float
    ) -> None:
        kets = [ket(c) for c in outcomes]
        reduced, total = _project_chain(d63, kets)
        oracle, oracle_total = _project_leading(d63, kets)

        assert total == pytest.approx(probability)
        assert oracle_total == pytest.approx(probability)
        assert abs(np.vdot(oracle, reduced.amplitudes)) == pytest.approx(1.0)
        assert abs(np.vdot(expected.amplitudes, reduced.amplitudes)) ** 2 == pytest.approx(1.0)

    @pytest.mark.parametrize("first", ["H", "V", "+", "-", "L", "R"])
    def test_outcome_probabilities_sum_to_one(self, d63: PureState, first: str) -> None:
        pair = (ket(first), ket(ORTHOGONAL[first]))
        assert sum(project_qubit(d63, 2, single)[1] for single in pair) == pytest.approx(1.0)


class TestNamedStates:
    def test_every_name_builds(self) -> None:
        for name in NAMED_STATES:
            assert named_state(name).label == name

    def test_names_are_case_insensitive(self) -> None:
        assert equal_up_to_phase(named_state("D63"), dicke((6, 3)))

    def test_unknown_name(self) -> None:
        with pytest.raises(ValueError, match="Unknown state"):
            named_state("d99")
