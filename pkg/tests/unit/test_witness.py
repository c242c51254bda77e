"""Tests for witnesses, the biseparable-bound optimizer and setting decompositions."""

import numpy as np
import pytest

import dickesim.quantum.witness as witness_module
from dickesim.errors import DecompositionError
from dickesim.quantum.collective import j_power
from dickesim.quantum.qcore import expectation, fidelity_with_pure
from dickesim.quantum.states import delta5, dicke, ghz, ghz_in_basis, maximally_mixed, named_state, rho5
from dickesim.quantum.witness import (
    J2_ALPHA_6,
    PROJECTOR_ALPHA_D63,
    decompose_settings,
    evaluate_witness,
    fidelity_bound_from_moments,
    ghz_two_setting_bound,
    ghz_two_setting_witness,
    j2_witness,
    max_bisep_overlap,
    moments_witness,
    moments_witness_value,
    optimize_bisep_bound,
    persistency_bound,
    projector,
    projector_witness,
    recombine,
    sample_biseparable_min,
    state_moments,
    subspace_witness,
    symmetrized_moments,
    witness_catalog,
    witness_observable,
)
from dickesim.types import MixedState, Observable, PureState


class TestProjectorWitness:
    def test_value_on_target(self, d63: PureState) -> None:
        assert expectation(d63, projector_witness(d63, PROJECTOR_ALPHA_D63)) == pytest.approx(-0.4)

    def test_alpha_outside_unit_interval(self, d63: PureState) -> None:
        with pytest.raises(ValueError):
            projector_witness(d63, 1.5)

    def test_max_bisep_overlaps(self, d63: PureState) -> None:
        assert max_bisep_overlap(d63) == pytest.approx(0.6)
        assert max_bisep_overlap(dicke((4, 2))) == pytest.approx(2 / 3)

    def test_projector_onto_span(self) -> None:
        proj = projector([dicke((5, 2)), dicke((5, 3))])
        np.testing.assert_allclose(proj @ proj, proj, atol=1e-12)
        assert np.trace(proj).real == pytest.approx(2.0)


class TestJ2Witness:
    def test_minimal_value_on_d63(self, d63: PureState) -> None:
        assert expectation(d63, j2_witness(6, J2_ALPHA_6)) == pytest.approx(-0.9821, abs=1e-4)

    def test_equals_alpha_minus_moments(self, random_mixed_state: np.ndarray) -> None:
        rho = MixedState(random_mixed_state)
        moments = state_moments(rho)
        value = expectation(rho, j2_witness(6, J2_ALPHA_6))
        assert value == pytest.approx(J2_ALPHA_6 - moments[("x", 2)] - moments[("y", 2)])


class TestMomentsWitness:
    def test_value_on_d63(self, d63: PureState) -> None:
        assert expectation(d63, moments_witness()) == pytest.approx(-1.0)

    def test_value_on_maximally_mixed(self) -> None:
        assert expectation(maximally_mixed(6), moments_witness()) == pytest.approx(2.65625)

    def test_value_from_moment_table(self, d63: PureState) -> None:
        assert moments_witness_value(state_moments(d63)) == pytest.approx(-1.0)

    def test_fidelity_bound_is_tight_on_d63(self) -> None:
        assert fidelity_bound_from_moments(-1.0) == pytest.approx(1.0)

    def test_fidelity_bound_is_a_lower_bound(self, d63: PureState, random_mixed_state: np.ndarray) -> None:
        noisy = 0.7 * d63.density().matrix + 0.3 * np.eye(64) / 64
        ghz_mix = 0.5 * ghz(6, -1).density().matrix + 0.5 * d63.density().matrix
        for matrix in (random_mixed_state, noisy, ghz_mix):
            rho = MixedState(matrix)
            bound = fidelity_bound_from_moments(expectation(rho, moments_witness()))
            assert bound <= fidelity_with_pure(rho, d63) + 1e-9


class TestSymmetrizedMoments:
    def test_first_moment_is_twice_collective_spin(self) -> None:
        ops = symmetrized_moments((0.0, 0.0, 1.0), 4)
        assert len(ops) == 5
        np.testing.assert_allclose(ops[1], 2 * j_power(4, "z", 1).matrix, atol=1e-12)

    def test_top_moment_is_full_tensor_power(self) -> None:
        ops = symmetrized_moments((1.0, 0.0, 0.0), 3)
        x = np.array([[0, 1], [1, 0]])
        np.testing.assert_allclose(ops[3], np.kron(np.kron(x, x), x), atol=1e-12)


class TestDecomposeSettings:
    def test_d63_projector_within_budget(self, d63: PureState) -> None:
        target = Observable(projector([d63]))
        decomposition = decompose_settings(target, 21, label="d63")
        assert decomposition.num_settings <= 21
        assert decomposition.residual <= 1e-9
        np.testing.assert_allclose(recombine(decomposition), target.matrix, atol=1e-9)

    def test_d63_directions_are_unit_vectors(self, d63: PureState) -> None:
        decomposition = decompose_settings(Observable(projector([d63])), 21)
        np.testing.assert_allclose(np.linalg.norm(decomposition.directions, axis=1), 1.0, atol=1e-12)

    def test_d42_projector(self) -> None:
        target = Observable(projector([dicke((4, 2))]))
        decomposition = decompose_settings(target, 9)
        assert decomposition.num_qubits == 4
        assert decomposition.num_settings <= 9
        np.testing.assert_allclose(recombine(decomposition), target.matrix, atol=1e-9)

    def test_d41_projector_has_odd_weights(self) -> None:
        target = Observable(projector([dicke((4, 1))]))
        decomposition = decompose_settings(target, 9)
        np.testing.assert_allclose(recombine(decomposition), target.matrix, atol=1e-9)

    def test_target_without_rotation_symmetry(self) -> None:
        target = Observable(projector([ghz_in_basis(4, -1, "x")]))
        decomposition = decompose_settings(target, 37)
        assert decomposition.residual <= 1e-9
        np.testing.assert_allclose(recombine(decomposition), target.matrix, atol=1e-9)

    def test_recombined_mismatch_is_rejected(self, d63: PureState, monkeypatch: pytest.MonkeyPatch) -> None:
        def fake_solve(target: np.ndarray, directions: list, num_qubits: int) -> tuple[np.ndarray, float]:
            return np.zeros((len(directions), num_qubits + 1)), 0.0

        monkeypatch.setattr(witness_module, "_solve", fake_solve)
        with pytest.raises(DecompositionError, match="Recombined") as excinfo:
            decompose_settings(Observable(projector([d63])), 21)
        assert excinfo.value.best_residual == pytest.approx(1.0)

    def test_jz_squared_needs_one_setting(self) -> None:
        decomposition = decompose_settings(j_power(6, "z", 2), 1)
        assert decomposition.num_settings == 1
        np.testing.assert_allclose(decomposition.directions[0], (0.0, 0.0, 1.0))

    def test_budget_too_small(self, d63: PureState) -> None:
        with pytest.raises(DecompositionError) as excinfo:
            decompose_settings(Observable(projector([d63])), 2)
        assert excinfo.value.best_residual > 1e-9

    def test_asymmetric_target_rejected(self) -> None:
        with pytest.raises(ValueError, match="symmetric"):
            decompose_settings(Observable(np.diag(np.arange(16.0))), 21)


class TestGHZTwoSettingWitness:
    def test_negative_on_ghz4_minus(self) -> None:
        alpha = ghz_two_setting_bound()
        value = expectation(ghz_in_basis(4, -1, "x"), ghz_two_setting_witness())
        assert 1.0 < alpha < 2.0
        assert value == pytest.approx(alpha - 2.0, abs=1e-9)
        assert value < 0

    def test_nonnegative_on_sampled_biseparable_states(self) -> None:
        assert sample_biseparable_min(ghz_two_setting_witness(), samples=300) >= -1e-9


class TestSubspaceWitness:
    def test_persistency_contrast(self) -> None:
        assert persistency_bound() < 1.0
        witness = subspace_witness([named_state("d52"), named_state("d53")], persistency_bound())
        assert expectation(rho5(), witness) < 0

    def test_ghz_remnant_is_not_detected(self) -> None:
        zeros, ones = np.zeros(32), np.zeros(32)
        zeros[0], ones[-1] = 1.0, 1.0
        witness = subspace_witness([PureState(zeros), PureState(ones)])
        reduced = MixedState(np.diag(np.r_[0.5, np.zeros(30), 0.5]))
        assert expectation(reduced, witness) == pytest.approx(0.0, abs=1e-6)


@pytest.mark.slow
class TestOptimizeBisepBound:
    def test_j2_bound(self) -> None:
        bound = optimize_bisep_bound(j_power(6, "x", 2) + j_power(6, "y", 2))
        assert bound.value == pytest.approx(J2_ALPHA_6, abs=0.01)

    def test_d63_projector(self, d63: PureState) -> None:
        assert optimize_bisep_bound(Observable(projector([d63]))).value == pytest.approx(0.6, abs=1e-6)

    def test_matches_schmidt_overlap(self) -> None:
        for state in (dicke((4, 2)), dicke((4, 1)), ghz_in_basis(4, -1, "x"), delta5(np.pi / 4, np.pi)):
            bound = optimize_bisep_bound(Observable(projector([state])))
            assert bound.value == pytest.approx(max_bisep_overlap(state), abs=1e-6)

    def test_identity(self) -> None:
        assert optimize_bisep_bound(np.eye(16)).value == pytest.approx(1.0)

    def test_reports_cuts(self, d63: PureState) -> None:
        seen = []
        optimize_bisep_bound(Observable(projector([d63])), restarts=4, on_cut=lambda cut, value: seen.append(value))
        assert len(seen) == 3


class TestCatalog:
    def test_names(self) -> None:
        assert set(witness_catalog()) == {
            "generic-d63",
            "j2-6",
            "moments-6",
            "ghz4-two-setting",
            "persistency-rho5",
        }

    def test_ideal_values(self, d63: PureState) -> None:
        catalog = witness_catalog()
        assert evaluate_witness(catalog["generic-d63"], d63) == pytest.approx(-0.4)
        assert evaluate_witness(catalog["j2-6"], d63) == pytest.approx(-0.9821, abs=1e-4)
        assert evaluate_witness(catalog["moments-6"], d63) == pytest.approx(-1.0)
        assert evaluate_witness(catalog["ghz4-two-setting"], ghz_in_basis(4, -1, "x")) < 0
        assert evaluate_witness(catalog["persistency-rho5"], rho5()) < 0


@pytest.mark.slow
class TestBiseparableFloor:
    @pytest.mark.parametrize("name", ["generic-d63", "ghz4-two-setting", "j2-6", "moments-6", "persistency-rho5"])
    def test_nonnegative_on_sampled_biseparable_states(self, name: str) -> None:
        observable = witness_observable(witness_catalog()[name])
        assert sample_biseparable_min(observable, samples=100_000, seed=17) >= -1e-6
