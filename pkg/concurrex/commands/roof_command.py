"""
Roof Command Module
Convex-roof estimation for a mixed state, with optional trace-class
extension for Hermitian operators.
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
from concurrex.oracles import separable_witness_ensemble, wootters_concurrence
from concurrex.report import UPPER_BOUND_LABEL
from concurrex.roof import estimate_summary, roof_minimize, trace_class_bound
from concurrex.states import PureState


def register_roof_command(app: typer.Typer):
    """Register the roof command to the app."""
    app.command(name="roof")(roof_command)


@handle_errors
def roof_command(
    state_file: Optional[str] = typer.Argument(None, help="State JSON file (pure inputs are treated as projectors)"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generated state, e.g. werner:p=0.8"),
    functional: Optional[str] = typer.Option(None, "--functional", help="concurrence, tangle or phc"),
    restarts: Optional[int] = typer.Option(None, "--restarts", "-r", help="Number of restarts"),
    ensemble_size: Optional[int] = typer.Option(None, "--ensemble-size", "-m", help="Ensemble cardinality m (rank <= m <= rank^2)"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Descent iterations per restart"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Parallel restart workers"),
    show_ensemble: bool = typer.Option(False, "--show-ensemble", help="Include the best ensemble weights"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    Estimate the convex roof (an upper bound) by multi-restart descent.

    Example:
        concurrex roof --family werner:p=0.8 --restarts 64 --seed 7
        concurrex roof state.json --functional tangle --workers 8
    """
    seed = command_seed(seed)
    with CommandRun("roof", state=state_file or family, seed=seed) as report:
        state = state_from_source(state_file, family, seed)
        if isinstance(state, PureState):
            state = state.density()

        cfg = roof_settings(seed, functional=functional, restarts=restarts, ensemble_size=ensemble_size,
                            max_iters=max_iters, workers=workers)
        report.inputs.update(functional=cfg.functional, restarts=cfg.restarts, ensemble_size=ensemble_size,
                             max_iters=cfg.max_iters, step_tol=cfg.step_tol, value_tol=cfg.value_tol)

        estimate = roof_minimize(state, cfg)
        report.results["label"] = UPPER_BOUND_LABEL
        report.results.update(estimate_summary(estimate))
        report.results["per_restart_values"] = list(estimate.per_restart_values)
        report.results["trace_class_bound"] = trace_class_bound(state.entries)
        if show_ensemble:
            report.results["ensemble_weights"] = estimate.best_ensemble.weights.tolist()
        if separable_witness_ensemble(state) is not None:
            report.results["separability_certificate"] = True
        if state.dims == (2, 2) and cfg.functional == "concurrence":
            report.results["wootters_concurrence"] = wootters_concurrence(state)
