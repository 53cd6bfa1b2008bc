"""
Measure Command Module
Concurrence, tangle and PHC measure of a state file or generated family.
"""

from typing import Optional

import numpy as np
import typer

from concurrex.commands.common import (
    CommandRun,
    command_seed,
    global_state,
    handle_errors,
    roof_settings,
    state_from_source,
)
from concurrex.oracles import wootters_concurrence
from concurrex.phc import phc_measure
from concurrex.pure_measures import pure_measure_report
from concurrex.report import UPPER_BOUND_LABEL
from concurrex.roof import bound_report, estimate_summary, roof_minimize
from concurrex.states import PureState


def register_measure_command(app: typer.Typer):
    """Register the measure command to the app."""
    app.command(name="measure")(measure_command)


def truncation_bounds(psi: PureState) -> dict:
    """
    Treat psi as a truncation of an implicit infinite state whose missing
    mass is |1 - ||raw||^2|.
    """
    tail = abs(1.0 - psi.raw_norm ** 2)
    trace_bound = 2.0 * np.sqrt(tail)
    return {
        "tail_mass": tail,
        "trace_distance_bound": trace_bound,
        "concurrence_error_bound": np.sqrt(2.0) * trace_bound,
    }


@handle_errors
def measure_command(
    state_file: Optional[str] = typer.Argument(None, help="State JSON file"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generated state, e.g. werner:p=0.8"),
    functional: Optional[str] = typer.Option(None, "--functional", help="Roof functional for mixed states: concurrence, tangle or phc"),
    restarts: Optional[int] = typer.Option(None, "--restarts", "-r", help="Roof restarts"),
    ensemble_size: Optional[int] = typer.Option(None, "--ensemble-size", "-m", help="Ensemble cardinality m"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Parallel restart workers"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
    as_truncation: bool = typer.Option(False, "--as-truncation", help="Treat a pure input as a truncation and report continuity bounds"),
):
    """
    Compute entanglement measures.

    Pure states: three concurrence formulas, tangle and the PHC measure.
    Mixed states: roof estimates (upper bounds) and the bound chain.

    Example:
        concurrex measure bell.json
        concurrex measure --family werner:p=0.8 --restarts 64 --seed 7
    """
    seed = command_seed(seed)
    with CommandRun("measure", state=state_file or family, seed=seed) as report:
        state = state_from_source(state_file, family, seed)

        if isinstance(state, PureState):
            report.inputs["kind"] = "pure"
            results = pure_measure_report(state).as_dict()
            results["phc"] = phc_measure(state)
            if as_truncation:
                results["truncation"] = truncation_bounds(state)
            elif abs(state.raw_norm - 1.0) > global_state.tol:
                report.warnings.append(
                    f"input norm {state.raw_norm:.17g} was renormalized; see --as-truncation")
            report.results.update(results)
            return

        cfg = roof_settings(seed, functional=functional, restarts=restarts,
                            ensemble_size=ensemble_size, workers=workers)
        report.inputs.update(kind="mixed", functional=cfg.functional, restarts=cfg.restarts,
                             ensemble_size=ensemble_size, max_iters=cfg.max_iters)
        estimate = roof_minimize(state, cfg)
        chain = bound_report(state, cfg)
        report.results["label"] = UPPER_BOUND_LABEL
        report.results[cfg.functional] = estimate_summary(estimate)
        report.results["bound_chain"] = {
            "c_sq": chain.c_sq,
            "tangle": chain.tangle,
            "purity_bound": chain.purity_bound,
        }
        if state.dims == (2, 2):
            report.results["wootters_concurrence"] = wootters_concurrence(state)
