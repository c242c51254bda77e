"""Run configuration commands."""

import json
from pathlib import Path
from typing import Any

from rich.console import Console

from dickesim.commands import reported_errors
from dickesim.errors import ConfigError
from dickesim.utils.config import (
    DEFAULT_CONFIG_FILE,
    KNOWN_KEYS,
    config_path,
    load_run_config,
    run_config_to_dict,
    update_run_config,
)
from dickesim.utils.formatter import format_output

console = Console()


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def set_config(key: str, value: str, path: str | None = None) -> None:
    with reported_errors("updating config"):
        if key not in KNOWN_KEYS:
            raise ConfigError(f"valid keys: {', '.join(sorted(KNOWN_KEYS))}", key)
        target = config_path(path) or DEFAULT_CONFIG_FILE
        update_run_config(target, {key: _parse_value(value)})

    console.print(f"[green]{key} set to {value} in {target}[/green]")


def show_config(fmt: str = "pretty", path: str | None = None) -> None:
    with reported_errors("loading config"):
        config = load_run_config(path)
        data = run_config_to_dict(config)

    if fmt == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
        return

    source = config_path(path)
    console.print(f"\n[bold]Run configuration[/bold] ({Path(source) if source else 'defaults'})\n")
    rows = [{"name": key, "value": value} for key, value in sorted(data.items()) if key != "tree"]
    print(format_output(rows, fmt))
    if "tree" in data:
        console.print("\n[dim]tree: custom splitter tree[/dim]")
