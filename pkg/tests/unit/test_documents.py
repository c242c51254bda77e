"""Tests for the JSON document layer."""

import json
from pathlib import Path

import numpy as np
import pytest

from dickesim.errors import SchemaError
from dickesim.experiment.measure import exact_histogram, setting_from_label, uniform_setting
from dickesim.experiment.photonics import default_tree
from dickesim.quantum.witness import witness_catalog
from dickesim.types import CountHistogram, LocalSetting, PureState, SettingDecomposition
from dickesim.utils.documents import (
    FORMAT_VERSION,
    decomposition_from_dict,
    decomposition_to_dict,
    dump_document,
    histogram_from_dict,
    histogram_to_dict,
    observable_terms_from_dict,
    observable_to_dict,
    read_document,
    read_histograms,
    report_to_dict,
    tree_from_dict,
    tree_to_dict,
    witness_from_dict,
    witness_to_dict,
    write_document,
)


class TestDocumentFiles:
    def test_dump_is_sorted_and_indented(self) -> None:
        text = dump_document({"b": 1, "a": 2})
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert "  " in text

    def test_write_creates_parent_directories(self, tmp_path: Path) -> None:
        path = tmp_path / "nested" / "doc.json"
        write_document(path, {"format_version": FORMAT_VERSION, "kind": "report"})
        assert read_document(path, "report")["kind"] == "report"

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(SchemaError, match="invalid JSON"):
            read_document(path)

    def test_wrong_version(self, tmp_path: Path) -> None:
        path = tmp_path / "old.json"
        path.write_text(json.dumps({"format_version": 99, "kind": "histogram"}), encoding="utf-8")
        with pytest.raises(SchemaError) as excinfo:
            read_document(path)
        assert excinfo.value.path == "old.json:$.format_version"

    def test_wrong_kind(self, tmp_path: Path) -> None:
        path = tmp_path / "report.json"
        write_document(path, report_to_dict({"estimates": []}))
        with pytest.raises(SchemaError, match="histogram"):
            read_document(path, "histogram")


class TestHistogramDocuments:
    def test_sampled_histogram(self, tmp_path: Path) -> None:
        hist = CountHistogram(setting_from_label("xz"), np.array([3, 0, 1, 2]), efficiencies=np.ones(4), seed=9)
        path = tmp_path / "00-xz.json"
        write_document(path, histogram_to_dict(hist, theory=np.full(4, 0.25)))
        (loaded,) = read_histograms([path])
        np.testing.assert_array_equal(loaded.counts, hist.counts)
        assert loaded.seed == 9
        assert loaded.label == "xz"
        assert not loaded.exact
        assert json.loads(path.read_text())["theory"] == [0.25] * 4

    def test_exact_histogram_keeps_fractional_counts(self, d63: PureState) -> None:
        hist = exact_histogram(d63, uniform_setting("x"), expected_total=1.0)
        loaded = histogram_from_dict(json.loads(dump_document(histogram_to_dict(hist))))
        assert loaded.exact
        np.testing.assert_allclose(loaded.counts, hist.counts)

    def test_angle_bases(self) -> None:
        hist = CountHistogram(LocalSetting(((0.3, 1.2), "z")), np.ones(4), efficiencies=np.ones(4))
        loaded = histogram_from_dict(histogram_to_dict(hist))
        assert loaded.setting.bases == ((0.3, 1.2), "z")

    def test_fractional_counts_rejected_for_sampled(self) -> None:
        doc = histogram_to_dict(CountHistogram(setting_from_label("z"), np.array([1, 1]), efficiencies=np.ones(2)))
        doc["counts"] = [0.5, 1]
        with pytest.raises(SchemaError) as excinfo:
            histogram_from_dict(doc)
        assert excinfo.value.path == "$.counts[0]"

    def test_wrong_bin_count(self) -> None:
        doc = histogram_to_dict(CountHistogram(setting_from_label("zz"), np.ones(4), efficiencies=np.ones(4)))
        doc["counts"] = [1, 2, 3]
        with pytest.raises(SchemaError, match="4 entries"):
            histogram_from_dict(doc)

    def test_missing_field(self) -> None:
        doc = histogram_to_dict(CountHistogram(setting_from_label("z"), np.array([1, 1]), efficiencies=np.ones(2)))
        del doc["efficiencies"]
        with pytest.raises(SchemaError, match="missing field"):
            histogram_from_dict(doc)

    def test_unknown_axis(self) -> None:
        doc = histogram_to_dict(CountHistogram(setting_from_label("z"), np.array([1, 1]), efficiencies=np.ones(2)))
        doc["setting"] = ["w"]
        with pytest.raises(SchemaError):
            histogram_from_dict(doc)


class TestDecompositionDocuments:
    def test_roundtrip(self) -> None:
        decomposition = SettingDecomposition(
            num_qubits=2,
            directions=[(0.0, 0.0, 1.0)],
            coefficients=[[0.0, 0.0, 0.5]],
            residual=0.0,
            target="jz2-2",
        )
        loaded = decomposition_from_dict(decomposition_to_dict(decomposition))
        assert loaded.directions == [(0.0, 0.0, 1.0)]
        assert loaded.coefficients == [[0.0, 0.0, 0.5]]
        assert loaded.target == "jz2-2"

    def test_coefficient_length_checked(self) -> None:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "decomposition",
            "num_qubits": 2,
            "directions": [[0, 0, 1]],
            "coefficients": [[1, 2]],
            "residual": 0,
        }
        with pytest.raises(SchemaError) as excinfo:
            decomposition_from_dict(doc)
        assert excinfo.value.path == "$.coefficients[0].c"


class TestWitnessDocuments:
    def test_catalog_entries_survive(self) -> None:
        for spec in witness_catalog().values():
            loaded = witness_from_dict(witness_to_dict(spec))
            assert loaded.kind == spec.kind
            assert loaded.alpha == pytest.approx(spec.alpha)
            assert loaded.num_qubits == spec.num_qubits

    def test_unknown_kind(self) -> None:
        doc = witness_to_dict(witness_catalog()["j2-6"])
        doc["witness_kind"] = "entropy"
        with pytest.raises(SchemaError, match="unknown witness kind"):
            witness_from_dict(doc)

    def test_bad_coefficients(self) -> None:
        doc = witness_to_dict(witness_catalog()["moments-6"])
        doc["coefficients"] = [["one/45"]]
        with pytest.raises(SchemaError, match="rational"):
            witness_from_dict(doc)


class TestTreeDocuments:
    def test_default_tree(self) -> None:
        tree = default_tree()
        assert tree_to_dict(tree_from_dict(tree_to_dict(tree))) == tree_to_dict(tree)

    def test_leaf_root_rejected(self) -> None:
        with pytest.raises(SchemaError, match="root"):
            tree_from_dict({"mode": "a"})

    def test_bad_ratio(self) -> None:
        doc = {"name": "BS1", "ratio": 2.0, "first": {"mode": "a"}, "second": {"mode": "b"}}
        with pytest.raises(SchemaError):
            tree_from_dict(doc)


class TestObservableDocuments:
    def test_terms(self) -> None:
        doc = observable_to_dict({"XXI": 0.5, "ZZZ": -1.0}, "demo")
        assert doc["num_qubits"] == 3
        assert observable_terms_from_dict(doc) == {"XXI": 0.5, "ZZZ": -1.0}

    def test_bad_pauli_string(self) -> None:
        doc = observable_to_dict({"XQ": 1.0})
        with pytest.raises(SchemaError, match="Pauli string"):
            observable_terms_from_dict(doc)

    def test_empty_terms(self) -> None:
        doc = observable_to_dict({})
        with pytest.raises(SchemaError):
            observable_terms_from_dict(doc)
