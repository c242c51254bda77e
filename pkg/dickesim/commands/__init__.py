"""Command implementations behind the dickesim CLI."""

import sys
from collections.abc import Iterator
from contextlib import contextmanager

from rich.console import Console

from dickesim.errors import exit_code

err_console = Console(stderr=True)


@contextmanager
def reported_errors(action: str) -> Iterator[None]:
    """Print library errors in red on stderr and exit with the matching code."""
    try:
        yield
    except Exception as e:
        err_console.print(f"[red]Error {action}: {e}[/red]", highlight=False)
        sys.exit(exit_code(e))


def verbose_line(verbose: bool, message: str) -> None:
    if verbose:
        err_console.print(f"[dim]{message}[/dim]", highlight=False)
