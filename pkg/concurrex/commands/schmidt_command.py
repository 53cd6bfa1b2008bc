"""
Schmidt Command Module
Schmidt coefficients, rank and reconstruction residual of a pure state.
"""

from typing import Optional

import numpy as np
import typer

from concurrex.commands.common import CommandRun, command_seed, handle_errors, state_from_source
from concurrex.config import RANK_CUTOFF
from concurrex.errors import KindError
from concurrex.states import PureState, schmidt


def register_schmidt_command(app: typer.Typer):
    """Register the schmidt command to the app."""
    app.command(name="schmidt")(schmidt_command)


@handle_errors
def schmidt_command(
    state_file: Optional[str] = typer.Argument(None, help="Pure-state JSON file"),
    family: Optional[str] = typer.Option(None, "--family", "-f", help="Generated state, e.g. two_mode_squeezed:r=0.5,d=8"),
    rank_cutoff: float = typer.Option(RANK_CUTOFF, "--rank-cutoff", help="Coefficients at or below this do not count towards the rank"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    Schmidt decomposition of a pure state.

    Example:
        concurrex schmidt bell.json
        concurrex schmidt --family two_mode_squeezed:r=0.5,d=8
    """
    seed = command_seed(seed)
    with CommandRun("schmidt", state=state_file or family, seed=seed, rank_cutoff=rank_cutoff) as report:
        state = state_from_source(state_file, family, seed)
        if not isinstance(state, PureState):
            raise KindError("schmidt needs a pure state; the input is mixed")
        form = schmidt(state, rank_cutoff=rank_cutoff)
        residual = float(np.max(np.abs(form.reconstruct() - state.amps)))
        report.results.update(
            coeffs=[float(c) for c in form.coeffs],
            rank=form.rank,
            reconstruction_residual=residual,
        )
