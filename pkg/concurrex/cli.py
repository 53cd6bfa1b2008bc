#!/usr/bin/env python3
"""
concurrex CLI Entry Point
Command-line interface for bipartite entanglement measures.
"""

import logging
import sys
from typing import Optional

import typer
from typer.core import TyperGroup

try:  # newer typer vendors its own copy of click
    from typer._click.exceptions import BadParameter, UsageError
except ImportError:
    from click import BadParameter, UsageError

from concurrex import __version__
from concurrex.commands.audit_command import register_audit_command
from concurrex.commands.common import global_state
from concurrex.commands.config_command import register_config_command
from concurrex.commands.family_command import register_family_command
from concurrex.commands.measure_command import register_measure_command
from concurrex.commands.phc_command import register_phc_command
from concurrex.commands.roof_command import register_roof_command
from concurrex.commands.scan_command import register_scan_command
from concurrex.commands.schmidt_command import register_schmidt_command
from concurrex.config import load_config, tolerance
from concurrex.exit_codes import ExitCode
from concurrex.utils import console


class ConcurrexGroup(TyperGroup):
    """Command-line usage errors exit with GENERAL_ERROR; 2 stays with rejected input."""

    @staticmethod
    def _reclassify(error: UsageError):
        if not isinstance(error, BadParameter):
            error.exit_code = ExitCode.GENERAL_ERROR

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except UsageError as e:
            self._reclassify(e)
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except UsageError as e:
            self._reclassify(e)
            raise


# Initialize the main Typer app
app = typer.Typer(
    name="concurrex",
    cls=ConcurrexGroup,
    help="Concurrence, tangle and PHC entanglement measures for bipartite states",
    add_completion=True,
    rich_markup_mode="rich",
)


def version_callback(value: bool):
    """Handle --version flag."""
    if value:
        from concurrex import __description__, __license__, __url__
        console.print(f"[bold cyan]concurrex[/bold cyan] v[bold]{__version__}[/bold]")
        console.print()
        console.print(__description__)
        console.print()
        console.print(f"License: {__license__}")
        console.print(f"Repository: {__url__}")
        raise typer.Exit(0)


@app.callback()
def main_callback(
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed; generated and echoed when omitted"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Normalization tolerance for pure-state inputs (default: norm_tol from config)"),
    json_out: Optional[str] = typer.Option(None, "--json-out", help="Also write the run report as JSON"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="No console report (use with --json-out)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
    debug: bool = typer.Option(False, "--debug", help="Debug mode with detailed logging"),
    version: Optional[bool] = typer.Option(None, "--version", callback=version_callback, is_eager=True, help="Show version and exit"),
):
    """
    concurrex - Bipartite entanglement measures

    Global options:
      --seed          Random seed for every randomized step
      --tol           Pure-state normalization tolerance
      --json-out      Write the run report to a JSON file
      --quiet, -q     Suppress console output
      --verbose, -v   Show detailed output
      --debug         Enable debug logging
    """
    global_state.seed = seed
    global_state.json_out = json_out
    global_state.quiet = quiet
    global_state.verbose = verbose
    global_state.debug = debug

    # Configure logging
    if debug:
        logging.basicConfig(
            level=logging.DEBUG,
            format='[%(levelname)s] %(name)s: %(message)s'
        )
    elif verbose:
        logging.basicConfig(
            level=logging.INFO,
            format='[%(levelname)s] %(message)s'
        )

    config = load_config()
    global_state.tol = tol if tol is not None else tolerance(config, "norm_tol")
    global_state.psd_tol = tolerance(config, "psd_tol")


@app.command(name="version")
def version_command():
    """Show version information."""
    from concurrex import __description__, __license__, __url__

    console.print(f"\n[bold cyan]concurrex[/bold cyan] v[bold]{__version__}[/bold]\n")
    console.print(f"[dim]{__description__}[/dim]\n")
    console.print(f"[dim]License: {__license__}[/dim]")
    console.print(f"[dim]Repository: {__url__}[/dim]\n")


@app.command(name="examples")
def examples_command():
    """Show common usage examples."""
    examples = """
[bold cyan]concurrex Usage Examples[/bold cyan]

[bold]States:[/bold]
  concurrex family bell --out bell.json                    # Write a state file
  concurrex family werner:p=0.8 -o werner.json             # Mixed family
  concurrex family two_mode_squeezed:r=0.5,d=16 -o tms.json

[bold]Pure-State Measures:[/bold]
  concurrex measure bell.json                              # C (3 formulas), tangle, PHC
  concurrex schmidt bell.json                              # Schmidt coefficients and rank
  concurrex phc bell.json --gauge-trials 16                # PHC check + gauge audit
  concurrex measure tms.json --as-truncation               # Truncation error bounds

[bold]Mixed States (upper bounds):[/bold]
  concurrex roof werner.json --restarts 64 --seed 7        # Roof estimate
  concurrex roof werner.json --functional tangle -w 8      # Tangle roof, 8 workers
  concurrex measure --family isotropic:p=0.6,d=3           # Roof + bound chain

[bold]Scans and Audits:[/bold]
  concurrex scan --family two_mode_squeezed:r=0.5 --dims 2,4,8,16
  concurrex audit bell.json --channel measure_b.json --mode wootters
  concurrex audit --trials 200 --seed 11                   # Random two-qubit audits
  concurrex audit --family werner:p=0.7 --unitary -n 20    # Local-unitary invariance

[bold]Reports:[/bold]
  concurrex --json-out run.json -q measure bell.json       # Machine-readable only
  concurrex --debug roof werner.json                       # Debug logging

[dim]Family parameters: werner p; isotropic p,d; two_mode_squeezed r,d; product da,db;
rank_k_random d,k; bell_diagonal w0..w3; separable_mixture n,d[/dim]
[dim]For more information, see: concurrex --help[/dim]
"""
    console.print(examples)


# Register all command modules
register_family_command(app)
register_measure_command(app)
register_schmidt_command(app)
register_phc_command(app)
register_roof_command(app)
register_scan_command(app)
register_audit_command(app)
register_config_command(app)


def main():
    """Main entry point for the CLI."""
    try:
        app()
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        sys.exit(ExitCode.INTERRUPT)
    except Exception as e:
        if global_state.debug:
            console.print_exception()
        else:
            console.print(f"[red]Error: {e}[/red]")
        sys.exit(ExitCode.GENERAL_ERROR)


if __name__ == "__main__":
    main()
