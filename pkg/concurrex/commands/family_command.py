"""
Family Command Module
Write a generated state to a state file.
"""

from typing import Optional

import typer

from concurrex.commands.common import CommandRun, command_seed, family_from_spec, handle_errors
from concurrex.oracles import FAMILY_DEFAULTS, make_family
from concurrex.serialization import write_state
from concurrex.states import PureState


def register_family_command(app: typer.Typer):
    """Register the family command to the app."""
    app.command(name="family")(family_command)


@handle_errors
def family_command(
    spec: str = typer.Argument(..., help="Family spec, e.g. werner:p=0.8"),
    out: str = typer.Option(..., "--out", "-o", help="Output state file"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    Generate a state from a named family and write it as JSON.

    Families: bell, werner, isotropic, two_mode_squeezed, product,
    rank_k_random, bell_diagonal, separable_mixture.

    Example:
        concurrex family bell --out bell.json
        concurrex family two_mode_squeezed:r=0.5,d=16 -o tmsv.json
    """
    seed = command_seed(seed)
    with CommandRun("family", spec=spec, seed=seed) as report:
        family = family_from_spec(spec, seed)
        state = make_family(family)
        path = write_state(out, state)
        params = dict(FAMILY_DEFAULTS[family.name])
        params.update(family.params)
        report.results.update(
            family=family.name,
            params=params,
            kind="pure" if isinstance(state, PureState) else "mixed",
            dims=list(state.dims),
            path=str(path),
        )
