"""Tests for run configuration utilities."""

import json
from pathlib import Path

import pytest

from dickesim.errors import ConfigError
from dickesim.experiment.photonics import default_tree
from dickesim.types import RunConfig
from dickesim.utils.config import (
    DEFAULT_CONFIG_FILE,
    RUN_PRESETS,
    apply_preset,
    config_path,
    expected_events_per_setting,
    load_run_config,
    run_config_from_dict,
    save_run_config,
    update_run_config,
)
from dickesim.utils.documents import tree_to_dict


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps(
            {
                "source": {"order_weights": {"3": 1.0, "4": 0.2}},
                "settings": ["xxxxxx", "zzzzzz"],
                "duration_hours": 2.0,
                "rate_per_minute": 5.0,
                "seed": 12,
            }
        ),
        encoding="utf-8",
    )
    return path


class TestLoadRunConfig:
    def test_defaults_without_file(self) -> None:
        config = load_run_config()

        assert config.settings == ["zzzzzz", "xxxxxx", "yyyyyy"]
        assert config.duration_hours == 31.5
        assert config.rate_per_minute == 3.7
        assert config.seed == 0
        assert config.output_dir == "runs"

    def test_load_existing_file(self, config_file: Path) -> None:
        config = load_run_config(config_file)

        assert config.source.order_weights == {3: 1.0, 4: 0.2}
        assert config.settings == ["xxxxxx", "zzzzzz"]
        assert config.duration_hours == 2.0
        assert config.seed == 12

    def test_environment_overrides_file(self, config_file: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("DICKESIM_CONFIG", str(config_file))
        monkeypatch.setenv("DICKESIM_SEED", "99")
        monkeypatch.setenv("DICKESIM_OUTPUT_DIR", "elsewhere")
        config = load_run_config()

        assert config.seed == 99
        assert config.output_dir == "elsewhere"
        assert config.rate_per_minute == 5.0

    def test_default_file_in_working_directory(self) -> None:
        DEFAULT_CONFIG_FILE.write_text(json.dumps({"seed": 4}), encoding="utf-8")
        assert config_path() == DEFAULT_CONFIG_FILE
        assert load_run_config().seed == 4

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="does not exist"):
            load_run_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_run_config(path)

    def test_tree_is_parsed(self, tmp_path: Path) -> None:
        path = tmp_path / "tree.json"
        path.write_text(json.dumps({"tree": tree_to_dict(default_tree())}), encoding="utf-8")
        config = load_run_config(path)
        assert config.tree is not None
        assert tree_to_dict(config.tree) == tree_to_dict(default_tree())


class TestRunConfigValidation:
    def test_unknown_key(self) -> None:
        with pytest.raises(ConfigError, match="unknown keys"):
            run_config_from_dict({"colour": "blue"})

    @pytest.mark.parametrize(
        ("data", "field"),
        [
            ({"duration_hours": "long"}, "duration_hours"),
            ({"rate_per_minute": -1.0}, "rate_per_minute"),
            ({"seed": "abc"}, "seed"),
            ({"settings": ["xxq"]}, "settings"),
            ({"settings": []}, "settings"),
            ({"efficiencies": [1.0] * 11}, "efficiencies"),
            ({"efficiencies": [0.0] * 12}, "efficiencies"),
            ({"source": {"order_weights": {"5": 1.0}}}, "source.order_weights"),
            ({"source": {"brightness": 1.0}}, "source"),
            ({"tree": {"mode": "a"}}, "tree"),
        ],
    )
    def test_invalid_fields_are_named(self, data: dict, field: str) -> None:
        with pytest.raises(ConfigError) as excinfo:
            run_config_from_dict(data)
        assert excinfo.value.field == field

    def test_settings_need_consistent_length(self) -> None:
        assert run_config_from_dict({"settings": "xxxx,zzzz"}).settings == ["xxxx", "zzzz"]


class TestSaveAndUpdate:
    def test_save_writes_sorted_json(self, tmp_path: Path) -> None:
        path = tmp_path / "nested" / "dickesim.json"
        save_run_config(RunConfig(seed=3), path)
        data = json.loads(path.read_text(encoding="utf-8"))

        assert data["seed"] == 3
        assert "tree" not in data
        assert list(data) == sorted(data)

    def test_update_merges_values(self, config_file: Path) -> None:
        config = update_run_config(config_file, {"seed": 5})

        assert config.seed == 5
        assert config.duration_hours == 2.0
        assert json.loads(config_file.read_text(encoding="utf-8"))["seed"] == 5

    def test_update_rejects_invalid_value(self, config_file: Path) -> None:
        with pytest.raises(ConfigError):
            update_run_config(config_file, {"rate_per_minute": 0})
        assert json.loads(config_file.read_text(encoding="utf-8"))["rate_per_minute"] == 5.0


class TestPresets:
    def test_fidelity_preset(self) -> None:
        config = apply_preset(RunConfig(), "fidelity")
        assert config.duration_hours == 31.5
        assert config.settings == ["zzzzzz", "xxxxxx", "yyyyyy"]

    def test_projection_preset_times_each_setting(self) -> None:
        config = apply_preset(RunConfig(), "projection")
        assert config.duration_hours == pytest.approx(3 * 279 / 60)
        assert expected_events_per_setting(config) == pytest.approx(3.7 * 279)

    def test_events_shared_by_measured_settings(self) -> None:
        config = RunConfig()
        assert expected_events_per_setting(config, 1) == pytest.approx(3.7 * 31.5 * 60)
        assert expected_events_per_setting(config) == pytest.approx(expected_events_per_setting(config, 1) / 3)

    def test_every_preset_applies(self) -> None:
        for name in RUN_PRESETS:
            assert apply_preset(RunConfig(), name).settings == RUN_PRESETS[name][1]

    def test_unknown_preset(self) -> None:
        with pytest.raises(ConfigError) as excinfo:
            apply_preset(RunConfig(), "weekend")
        assert excinfo.value.field == "preset"
