"""Output formatting utilities for dickesim."""

import io
import json
from typing import Any

import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.table import Table

OutputFormat = str  # "json" | "table" | "csv" | "pretty"

DisplayRow = dict[str, Any]

FORMATS = ("json", "table", "csv", "pretty")


def format_output(data: list[DisplayRow], fmt: OutputFormat = "json") -> str:
    if fmt == "json":
        return json.dumps(data, indent=2, default=_json_default)
    elif fmt == "pretty":
        return _format_pretty(data)
    elif fmt == "table":
        return _format_table(data)
    elif fmt == "csv":
        return _format_csv(data)
    else:
        return json.dumps(data, indent=2, default=_json_default)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return str(value)


def _format_pretty(data: list[DisplayRow]) -> str:
    output: list[str] = []

    for entry in data:
        name = entry.get("name", "")
        line = f"[bold]{escape(str(name))}[/bold]"

        value = entry.get("value")
        if isinstance(value, int | float):
            colour = "red" if value < 0 else "green"
            line += f" [{colour}]{format_number(value)}[/{colour}]"
            sigma = entry.get("sigma")
            if isinstance(sigma, int | float):
                line += f" ± {format_number(sigma)}"

        extras = {k: v for k, v in entry.items() if k not in ("name", "value", "sigma")}
        for key, extra in extras.items():
            line += f" [dim]{escape(key)}[/dim]={escape(_format_value(extra))}"

        # Render with Rich to get ANSI codes
        buf = io.StringIO()
        temp_console = Console(file=buf, highlight=False, force_terminal=True, width=200)
        temp_console.print(line, end="")
        output.append(buf.getvalue())

    return "\n".join(output)


def _collect_keys(data: list[DisplayRow]) -> list[str]:
    all_keys: list[str] = []
    seen: set[str] = set()
    for entry in data:
        for key in entry:
            if key not in seen:
                seen.add(key)
                all_keys.append(key)
    return all_keys


def _format_table(data: list[DisplayRow]) -> str:
    if not data:
        return "No results found"

    all_keys = _collect_keys(data)
    table = Table(show_header=True, header_style="bold")
    for key in all_keys:
        if key in ("value", "sigma", "probability", "count", "theory"):
            table.add_column(key, justify="right")
        else:
            table.add_column(key)

    for entry in data:
        row = [_format_value(entry.get(key)) if entry.get(key) is not None else "" for key in all_keys]
        table.add_row(*row)

    buf = io.StringIO()
    console = Console(file=buf, force_terminal=True, width=200)
    console.print(table, end="")
    return buf.getvalue()


def _format_csv(data: list[DisplayRow]) -> str:
    if not data:
        return ""

    all_keys = _collect_keys(data)
    lines: list[str] = []
    lines.append(",".join(_escape_csv(h) for h in all_keys))

    for entry in data:
        row: list[str] = []
        for key in all_keys:
            value = entry.get(key)
            if value is None:
                row.append("")
            elif isinstance(value, dict | list | tuple):
                row.append(_escape_csv(json.dumps(value, default=_json_default)))
            else:
                row.append(_escape_csv(str(value)))
        lines.append(",".join(row))

    return "\n".join(lines)


def _escape_csv(value: str) -> str:
    if "," in value or '"' in value or "\n" in value:
        return f'"{value.replace(chr(34), chr(34) + chr(34))}"'
    return value


def _format_value(value: Any) -> str:
    if value is None:
        return "None"

    if isinstance(value, float):
        return format_number(value)

    if isinstance(value, dict | list | tuple):
        try:
            return json.dumps(value, default=_json_default)
        except (TypeError, ValueError):
            return str(value)

    return str(value)


def format_number(value: float, digits: int = 6) -> str:
    if value == 0:
        return "0"
    if abs(value) < 10 ** -(digits - 2) or abs(value) >= 1e6:
        return f"{value:.{digits - 2}e}"
    return f"{value:.{digits}g}"


def format_amplitude(value: complex) -> str:
    re, im = float(np.real(value)), float(np.imag(value))
    if abs(im) < 1e-12:
        return format_number(re)
    if abs(re) < 1e-12:
        return f"{format_number(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"{format_number(re)}{sign}{format_number(abs(im))}i"
