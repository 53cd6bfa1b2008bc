"""
PHC Command Module
Partial-Hermitian-conjugate measure and separability check.
"""

from typing import Optional

import typer

from concurrex.commands.common import (
    CommandRun,
    command_seed,
    handle_errors,
    roof_settings,
    state_from_source,
)
from concurrex.config import load_config, tolerance
from concurrex.phc import (
    NORMS,
    phc_gauge_deviation,
    phc_measure,
    phc_measure_mixed,
    phc_result,
    phc_separability_check,
)
from concurrex.pure_measures import concurrence_purity
from concurrex.report import UPPER_BOUND_LABEL
from concurrex.states import PureState
from concurrex.utils import make_rng


def register_phc_command(app: typer.Typer):
    """Register the phc command to the app."""
    app.command(name="phc")(phc_command)


@handle_errors
def phc_command(
    state_file: Optional[str] = typer.Argument(None, help="State JSON file"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generated state"),
    norm: str = typer.Option("hs", "--norm", help=f"Distance norm: {', '.join(NORMS)} (trace is experimental)"),
    tol: Optional[float] = typer.Option(None, "--phc-tol", help="PHC-invariance tolerance (default: phc_tol from config)"),
    gauge_trials: int = typer.Option(8, "--gauge-trials", help="Random Schmidt regaugings to audit (0 to skip)"),
    restarts: Optional[int] = typer.Option(None, "--restarts", "-r", help="Roof restarts for mixed states"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    PHC measure ||rho - rho^PHC||_2 and PHC separability check.

    Example:
        concurrex phc bell.json
        concurrex phc --family product --gauge-trials 16
    """
    seed = command_seed(seed)
    if tol is None:
        tol = tolerance(load_config(), "phc_tol")
    with CommandRun("phc", state=state_file or family, seed=seed, norm=norm, phc_tol=tol) as report:
        state = state_from_source(state_file, family, seed)

        if not isinstance(state, PureState):
            cfg = roof_settings(seed, restarts=restarts)
            report.inputs.update(kind="mixed", restarts=cfg.restarts)
            report.results.update(label=UPPER_BOUND_LABEL, phc=phc_measure_mixed(state, cfg))
            return

        result = phc_result(state, tol=tol)
        report.inputs["kind"] = "pure"
        report.results.update(
            phc=phc_measure(state, norm=norm),
            hs_distance=result.hs_distance,
            is_phc_invariant=phc_separability_check(state, tol=tol),
            concurrence=concurrence_purity(state),
        )
        if gauge_trials > 0:
            report.results["gauge_deviation"] = phc_gauge_deviation(state, make_rng(seed), trials=gauge_trials)
