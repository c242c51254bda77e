"""CLI entry point for dickesim."""

import click
import typer

from dickesim import __version__

EPILOG = """\
Examples:

  # Simulate the six-photon source and analyze it:
  $ dickesim simulate --out runs/fidelity            # z, x, y settings for 31.5 h at 3.7/min
  $ dickesim analyze runs/fidelity/*.json --threshold "moments-6<0"

  # Fidelity from the symmetric decomposition:
  $ dickesim decompose d63 --budget 21 --out runs/d63.json
  $ dickesim simulate --decomposition runs/d63.json --out runs/decomp
  $ dickesim analyze runs/decomp/*.json --decomposition runs/d63.json

  # Projected states:
  $ dickesim simulate --state ghz4- --preset two-setting --out runs/ghz4
  $ dickesim simulate --state rho5 --settings pauli --exact --out runs/rho5

  # Witness bounds and states:
  $ dickesim optimize jxy2-6qubit                   # alpha = 11.0179
  $ dickesim witness --evaluate d63
  $ dickesim state d63

Environment:
  DICKESIM_CONFIG       # run configuration file (default ./dickesim.json)
  DICKESIM_OUTPUT_DIR   # output directory
  DICKESIM_SEED         # random seed

Exit codes: 0 success, 1 failure or failed threshold, 2 config error, 3 schema error, 4 numerical failure.
"""


class EpilogGroup(typer.core.TyperGroup):
    """Custom group that preserves epilog formatting."""

    def get_help(self, ctx: click.Context) -> str:
        # Rich reflows the epilog, so append it ourselves
        epilog = self.epilog
        self.epilog = None
        help_text = super().get_help(ctx)
        self.epilog = epilog
        if epilog:
            help_text += "\n\n" + epilog
        return help_text


app = typer.Typer(
    name="dickesim",
    help="Simulation and analysis of six-photon symmetric Dicke state experiments",
    invoke_without_command=True,
    cls=EpilogGroup,
)

config_app = typer.Typer(help="Manage the run configuration")
app.add_typer(config_app, name="config")


def version_callback(value: bool) -> None:
    if value:
        print(f"dickesim {__version__}")
        raise typer.Exit()


def check_format(value: str) -> str:
    from dickesim.utils.formatter import FORMATS

    if value not in FORMATS:
        raise typer.BadParameter(f"expected one of {', '.join(FORMATS)}")
    return value


@app.callback(epilog=EPILOG, invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        help="Show version and exit",
        callback=version_callback,
        is_eager=True,
    ),
) -> None:
    """Simulation and analysis of six-photon symmetric Dicke state experiments"""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        raise typer.Exit()


@app.command()
def simulate(
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed (overrides config and DICKESIM_SEED)"),
    out: str | None = typer.Option(None, "-o", "--out", help="Output directory for histogram documents"),
    settings: str | None = typer.Option(
        None, "--settings", help="Comma-separated settings (e.g. z,x,y or xxzzyy), or 'pauli'"
    ),
    decomposition: str | None = typer.Option(None, "--decomposition", help="Measure the settings of a decomposition"),
    state: str | None = typer.Option(None, "--state", help="Simulate a named ideal state instead of the source"),
    preset: str | None = typer.Option(None, "--preset", help="Run preset (fidelity|two-setting|projection)"),
    exact: bool = typer.Option(False, "--exact", help="Infinite statistics: counts are expected values"),
    emit_csv: bool = typer.Option(False, "--emit-csv", help="Also write outcome,count,theory CSV per setting"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Show per-setting counts"),
) -> None:
    """Simulate coincidence histograms, one document per setting."""
    from dickesim.commands.simulate import run_simulate

    run_simulate(
        config_path=config,
        seed=seed,
        out=out,
        settings=settings,
        decomposition=decomposition,
        state=state,
        preset=preset,
        exact=exact,
        emit_csv=emit_csv,
        fmt=fmt,
        verbose=verbose,
    )


@app.command()
def analyze(
    files: list[str] = typer.Argument(help="Histogram documents"),
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
    decomposition: str | None = typer.Option(None, "--decomposition", help="Decomposition for the fidelity"),
    witness: list[str] | None = typer.Option(
        None, "-w", "--witness", help="Only evaluate these catalog witnesses or witness files"
    ),
    target: str = typer.Option("d63", "--target", help="Named target state for the full Pauli fidelity"),
    threshold: list[str] | None = typer.Option(None, "-t", "--threshold", help="Check such as moments-6<0"),
    bootstrap: int = typer.Option(0, "--bootstrap", help="Bootstrap resamples (0: linear error propagation)"),
    seed: int | None = typer.Option(None, "--seed", help="Bootstrap seed"),
    out: str | None = typer.Option(None, "-o", "--out", help="Report document path"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Show skipped estimates and counts"),
) -> None:
    """Estimate moments, witnesses, fidelity and the Bell value from histograms."""
    from dickesim.commands.analyze import run_analyze
    from dickesim.utils.options import resolve_runtime_options

    try:
        options = resolve_runtime_options(seed=seed, thresholds=threshold, bootstrap=bootstrap)
    except ValueError as e:
        raise typer.BadParameter(str(e), param_hint="--threshold") from e

    run_analyze(
        files,
        config_path=config,
        decomposition=decomposition,
        witnesses=witness or None,
        target=target,
        thresholds=options.thresholds,
        bootstrap=options.bootstrap,
        seed=options.seed,
        out=out,
        fmt=fmt,
        verbose=verbose,
    )


@app.command()
def optimize(
    observable: str = typer.Argument(help="jxy2-6qubit, bell-d63, identity, <state>-projector or a JSON file"),
    restarts: int = typer.Option(64, "--restarts", help="Random restarts per bipartition"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
    save: str | None = typer.Option(None, "--save", help="Also write the observable as a Pauli-term document"),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Show the value reached on each cut"),
) -> None:
    """Maximum expectation over biseparable states (the witness offset alpha)."""
    from dickesim.commands.optimize import run_optimize
    from dickesim.utils.options import env_seed

    run_optimize(
        observable,
        restarts=restarts,
        seed=seed if seed is not None else env_seed(),
        save=save,
        fmt=fmt,
        verbose=verbose,
    )


@app.command()
def decompose(
    target: str = typer.Argument(help="Named state (projector target) or jz2[-N]"),
    budget: int = typer.Option(21, "-b", "--budget", help="Maximum number of settings"),
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
    out: str | None = typer.Option(None, "-o", "--out", help="Decomposition document path"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Show residual and directions"),
) -> None:
    """Local measurement settings reproducing a symmetric operator."""
    from dickesim.commands.decompose import run_decompose

    run_decompose(target, budget=budget, config_path=config, out=out, fmt=fmt, verbose=verbose)


@app.command()
def calibrate(
    fidelity: float = typer.Option(0.654, "--fidelity", help="Target fidelity with D(6,3)"),
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
    save: bool = typer.Option(False, "--save", help="Store the weight in the config file"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Show the achieved fidelity"),
) -> None:
    """Fourth-order emission weight reproducing a source fidelity."""
    from dickesim.commands.calibrate import run_calibrate

    run_calibrate(fidelity, config_path_option=config, save=save, fmt=fmt, verbose=verbose)


@app.command()
def state(
    name: str | None = typer.Argument(None, help="Named state (omit with --list)"),
    list_all: bool = typer.Option(False, "-l", "--list", help="List the named states"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
) -> None:
    """Print the amplitudes of a named state."""
    from dickesim.commands.state import list_states, show_state

    if list_all or name is None:
        list_states(fmt=fmt)
    else:
        show_state(name, fmt=fmt)


@app.command()
def witness(
    evaluate: str | None = typer.Option(None, "--evaluate", help="Exact value on a named state (or rho5)"),
    export: str | None = typer.Option(None, "--export", help="Write the named witness document (NAME=PATH)"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
) -> None:
    """List the witness catalog."""
    from dickesim.commands.witness import export_witness, list_witnesses

    if export:
        name, sep, path = export.partition("=")
        if not sep or not path:
            raise typer.BadParameter("expected NAME=PATH", param_hint="--export")
        export_witness(name, path)
        return
    list_witnesses(fmt=fmt, evaluate=evaluate)


# Config subcommands
@config_app.command("set")
def config_set(
    key: str = typer.Argument(help="Configuration key (settings|duration_hours|rate_per_minute|seed|...)"),
    value: str = typer.Argument(help="Configuration value (JSON or plain string)"),
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
) -> None:
    """Set a configuration value."""
    from dickesim.commands.config_cmd import set_config

    set_config(key, value, path=config)


@config_app.command("show")
def config_show(
    config: str | None = typer.Option(None, "-c", "--config", help="Run configuration file"),
    fmt: str = typer.Option(
        "pretty", "-f", "--format", callback=check_format, help="Output format (json|table|csv|pretty)"
    ),
) -> None:
    """Show the effective run configuration."""
    from dickesim.commands.config_cmd import show_config

    show_config(fmt=fmt, path=config)
