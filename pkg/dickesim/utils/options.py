"""CLI option normalization utilities for dickesim."""

import os
import re
from dataclasses import dataclass
from typing import Any

from dickesim.types import AXES

THRESHOLD_PATTERN = re.compile(r"^\s*(?P<name>[^<>=\s]+)\s*(?P<op><=|>=|<|>)\s*(?P<value>-?\d*\.?\d+(?:e-?\d+)?)\s*$")


@dataclass
class RuntimeOptions:
    seed: int | None = None
    thresholds: list[tuple[str, str, float]] | None = None
    bootstrap: int = 0


def normalize_settings_option(input_val: str | list[str] | None = None, num_sites: int | None = 6) -> list[str] | None:
    """Comma separated setting labels; a single axis letter expands to the uniform setting.

    With num_sites None the length is taken from the first full label and must agree across labels.
    """
    if not input_val:
        return None

    raw_values = input_val if isinstance(input_val, list) else [input_val]
    labels: list[str] = []
    for value in raw_values:
        for name in value.split(","):
            stripped = name.strip().lower()
            if not stripped:
                continue
            if stripped in AXES and num_sites is not None:
                stripped = stripped * num_sites
            expected = num_sites if num_sites is not None else len(labels[0]) if labels else len(stripped)
            if len(stripped) < 2 or len(stripped) != expected or any(c not in AXES for c in stripped):
                raise ValueError(f"Invalid measurement setting: {name.strip()}")
            labels.append(stripped)

    if not labels:
        return None

    return list(dict.fromkeys(labels))


def parse_seed_option(raw_value: Any) -> int | None:
    if isinstance(raw_value, bool):
        return None
    if isinstance(raw_value, int):
        return raw_value
    if isinstance(raw_value, float) and raw_value == raw_value:  # not NaN
        return int(raw_value)
    if isinstance(raw_value, str):
        try:
            return int(raw_value.strip())
        except ValueError:
            return None
    return None


def parse_threshold_option(input_val: str | list[str] | None = None) -> list[tuple[str, str, float]] | None:
    """Parse checks such as "moments-6<0" or "fidelity>=0.6"."""
    if not input_val:
        return None

    raw_values = input_val if isinstance(input_val, list) else [input_val]
    checks: list[tuple[str, str, float]] = []
    for raw in raw_values:
        if not raw or not raw.strip():
            continue
        match = THRESHOLD_PATTERN.match(raw)
        if not match:
            raise ValueError(f"Invalid threshold: {raw} (expected NAME<VALUE, NAME>=VALUE, ...)")
        checks.append((match["name"], match["op"], float(match["value"])))

    return checks if checks else None


def env_seed() -> int | None:
    return parse_seed_option(os.environ.get("DICKESIM_SEED"))


def resolve_runtime_options(
    seed: Any = None,
    thresholds: str | list[str] | None = None,
    bootstrap: Any = None,
) -> RuntimeOptions:
    parsed_seed = parse_seed_option(seed)
    if parsed_seed is None:
        parsed_seed = env_seed()
    parsed_bootstrap = parse_seed_option(bootstrap) or 0

    return RuntimeOptions(
        seed=parsed_seed,
        thresholds=parse_threshold_option(thresholds),
        bootstrap=max(parsed_bootstrap, 0),
    )
