"""Run configuration management for dickesim."""

import json
import os
from pathlib import Path
from typing import Any

from dickesim.errors import ConfigError, SchemaError
from dickesim.types import RunConfig, SourceConfig
from dickesim.utils.documents import tree_from_dict, tree_to_dict
from dickesim.utils.options import normalize_settings_option, parse_seed_option

DEFAULT_CONFIG_FILE = Path("dickesim.json")

# measurement durations of the experiment, in hours
FIDELITY_RUN_HOURS = 31.5
TWO_SETTING_RUN_HOURS = 17.1
PROJECTION_RUN_HOURS = 279 / 60

RUN_PRESETS: dict[str, tuple[float, list[str]]] = {
    "fidelity": (FIDELITY_RUN_HOURS, ["zzzzzz", "xxxxxx", "yyyyyy"]),
    "two-setting": (TWO_SETTING_RUN_HOURS, ["xxxx", "zzzz"]),
    "projection": (PROJECTION_RUN_HOURS, ["zzzzz", "xxxxx", "yyyyy"]),
}

KNOWN_KEYS = {
    "source",
    "tree",
    "settings",
    "duration_hours",
    "rate_per_minute",
    "seed",
    "output_dir",
    "efficiencies",
    "efficiency_sigmas",
    "extra",
}


def config_path(explicit: str | Path | None = None) -> Path | None:
    if explicit:
        return Path(explicit)
    env_path = os.environ.get("DICKESIM_CONFIG")
    if env_path:
        return Path(env_path)
    return DEFAULT_CONFIG_FILE if DEFAULT_CONFIG_FILE.exists() else None


def _apply_env(config: RunConfig) -> RunConfig:
    env_seed = parse_seed_option(os.environ.get("DICKESIM_SEED"))
    if env_seed is not None:
        config.seed = env_seed
    env_out = os.environ.get("DICKESIM_OUTPUT_DIR")
    if env_out:
        config.output_dir = env_out
    return config


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"expected a number, got {value!r}", field)
    return float(value)


def _number_list(value: Any, field: str, length: int) -> list[float]:
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(f"expected a list of {length} numbers", field)
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _source_from_dict(data: Any) -> SourceConfig:
    if not isinstance(data, dict):
        raise ConfigError("expected an object", "source")
    unknown = set(data) - {"order_weights", "efficiency"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", "source")
    raw_weights = data.get("order_weights", {"3": 1.0, "4": 0.0})
    if not isinstance(raw_weights, dict):
        raise ConfigError("expected an object of order -> weight", "source.order_weights")
    weights: dict[int, float] = {}
    for key, value in raw_weights.items():
        try:
            order = int(key)
        except ValueError as e:
            raise ConfigError(f"order {key!r} is not an integer", "source.order_weights") from e
        if order not in (3, 4):
            raise ConfigError(f"order {order} is not modelled (use 3 or 4)", "source.order_weights")
        weights[order] = _number(value, f"source.order_weights.{key}")
    return SourceConfig(order_weights=weights, efficiency=_number(data.get("efficiency", 1.0), "source.efficiency"))


def run_config_from_dict(data: dict[str, Any]) -> RunConfig:
    unknown = set(data) - KNOWN_KEYS - {"format_version", "kind"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")

    config = RunConfig()
    if "source" in data:
        config.source = _source_from_dict(data["source"])
    if data.get("tree") is not None:
        try:
            config.tree = tree_from_dict(data["tree"], "tree")
        except SchemaError as e:
            raise ConfigError(str(e), "tree") from e
    if "settings" in data:
        try:
            settings = normalize_settings_option(data["settings"], num_sites=None)
        except (ValueError, AttributeError) as e:
            raise ConfigError(str(e), "settings") from e
        if not settings:
            raise ConfigError("at least one setting is required", "settings")
        config.settings = settings
    for key in ("duration_hours", "rate_per_minute"):
        if key in data:
            setattr(config, key, _number(data[key], key))
    if "seed" in data:
        seed = parse_seed_option(data["seed"])
        if seed is None:
            raise ConfigError(f"expected an integer, got {data['seed']!r}", "seed")
        config.seed = seed
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError("expected a path string", "output_dir")
        config.output_dir = data["output_dir"]
    for key in ("efficiencies", "efficiency_sigmas"):
        if key in data:
            setattr(config, key, _number_list(data[key], key, 12))
    if any(e <= 0 for e in config.efficiencies):
        raise ConfigError("detector efficiencies must be positive", "efficiencies")
    if "extra" in data:
        if not isinstance(data["extra"], dict):
            raise ConfigError("expected an object", "extra")
        config.extra = data["extra"]
    # re-run the dataclass checks on the updated fields
    config.__post_init__()
    return config


def run_config_to_dict(config: RunConfig) -> dict[str, Any]:
    data: dict[str, Any] = {
        "source": {
            "order_weights": {str(k): v for k, v in sorted(config.source.order_weights.items())},
            "efficiency": config.source.efficiency,
        },
        "tree": tree_to_dict(config.tree) if config.tree is not None else None,
        "settings": list(config.settings),
        "duration_hours": config.duration_hours,
        "rate_per_minute": config.rate_per_minute,
        "seed": config.seed,
        "output_dir": config.output_dir,
        "efficiencies": list(config.efficiencies),
        "efficiency_sigmas": list(config.efficiency_sigmas),
        "extra": config.extra,
    }
    return {k: v for k, v in data.items() if v is not None}


def load_run_config(path: str | Path | None = None) -> RunConfig:
    """File values, then DICKESIM_* environment overrides; defaults when no file is configured."""
    resolved = config_path(path)
    if resolved is None:
        return _apply_env(RunConfig())
    if not resolved.exists():
        raise ConfigError(f"config file {resolved} does not exist")

    try:
        data = json.loads(resolved.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return _apply_env(run_config_from_dict(data))


def save_run_config(config: RunConfig, path: str | Path) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(run_config_to_dict(config), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def update_run_config(path: str | Path, updates: dict[str, Any]) -> RunConfig:
    target = Path(path)
    try:
        data = json.loads(target.read_text(encoding="utf-8")) if target.exists() else {}
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    data.update(updates)
    config = run_config_from_dict(data)
    save_run_config(config, target)
    return config


def expected_events_per_setting(config: RunConfig, num_settings: int | None = None) -> float:
    """The run time is shared equally between the settings, by default the configured ones."""
    return config.rate_per_minute * config.duration_hours * 60 / (num_settings or len(config.settings))


def apply_preset(config: RunConfig, preset: str) -> RunConfig:
    """Duration and settings of one of the recorded runs; projection runs time each setting separately."""
    if preset not in RUN_PRESETS:
        raise ConfigError(f"unknown preset {preset!r} (known: {', '.join(RUN_PRESETS)})", "preset")
    hours, settings = RUN_PRESETS[preset]
    config.settings = list(settings)
    config.duration_hours = hours * len(settings) if preset == "projection" else hours
    return config
