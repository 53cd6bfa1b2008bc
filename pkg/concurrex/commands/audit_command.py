"""
Audit Command Module
Monotonicity audits of the concurrence under one-sided local instruments.
"""

from typing import Optional

import typer

from concurrex.channels import AUDIT_MODES, run_audit_trials
from concurrex.commands.common import (
    CommandRun,
    command_seed,
    handle_errors,
    roof_settings,
    state_from_source,
)
from concurrex.serialization import read_channel
from concurrex.states import PureState


def register_audit_command(app: typer.Typer):
    """Register the audit command to the app."""
    app.command(name="audit")(audit_command)


@handle_errors
def audit_command(
    state_file: Optional[str] = typer.Argument(None, help="State JSON file (random two-qubit states if omitted)"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generated state instead of a file"),
    channel: Optional[str] = typer.Option(None, "--channel", "-c", help="Channel/instrument JSON file (random instruments if omitted)"),
    mode: str = typer.Option("wootters", "--mode", help=f"Measure mode: {', '.join(AUDIT_MODES)}"),
    trials: int = typer.Option(1, "--trials", "-n", help="Number of seeded trials"),
    branches: int = typer.Option(2, "--branches", help="Branches of random instruments"),
    side: str = typer.Option("B", "--side", help="Side of random instruments (A or B)"),
    unitary: bool = typer.Option(False, "--unitary", help="Random local unitaries instead of instruments"),
    restarts: Optional[int] = typer.Option(None, "--restarts", "-r", help="Roof restarts (roof and pure_exact modes)"),
    workers: int = typer.Option(1, "--workers", "-w", help="Parallel trial workers"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    Check C(rho) >= sum_k p_k C(rho_k) over instrument branches.

    Example:
        concurrex audit bell.json --channel measure_b.json --mode wootters
        concurrex audit --trials 200 --seed 11
        concurrex audit --family werner:p=0.7 --unitary --trials 20
    """
    seed = command_seed(seed)
    with CommandRun("audit", state=state_file or family, channel=channel, mode=mode, seed=seed) as report:
        rho = None
        if state_file or family:
            rho = state_from_source(state_file, family, seed)
            if isinstance(rho, PureState):
                rho = rho.density()
        instrument = read_channel(channel) if channel else None
        if rho is not None and instrument is not None and trials > 1:
            # nothing random left to vary
            trials = 1
        cfg = roof_settings(seed, restarts=restarts)

        report.inputs.update(trials=trials, branches=branches, side=side,
                             channel_kind="unitary" if unitary else "instrument")
        summary = run_audit_trials(
            trials, seed, mode=mode, workers=workers,
            channel_kind="unitary" if unitary else "instrument",
            branches=branches, side=side, rho=rho, instrument=instrument, cfg=cfg,
        )
        report.results.update(summary.as_dict())
        if summary.trials == 1:
            report.results["margin"] = summary.margins[0]
