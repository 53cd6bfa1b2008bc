"""
Shared command plumbing: global flags, error panels, report setup and
state loading.
"""

import functools
import logging
from typing import Any, Callable, Optional, Union

import typer
from rich import box
from rich.markup import escape
from rich.panel import Panel

from concurrex.config import NORM_TOL, PSD_TOL, load_config, roof_config_from
from concurrex.errors import ConcurrexError, ParamError
from concurrex.exit_codes import get_error_suggestions
from concurrex.oracles import StateFamily, make_family, parse_family_spec
from concurrex.report import RunReport, collect_warnings, emit, timed
from concurrex.serialization import read_state
from concurrex.states import DensityMatrix, PureState
from concurrex.utils import console, resolve_seed

logger = logging.getLogger(__name__)


# Global state for flags set on the main callback
class GlobalState:
    seed: Optional[int] = None
    tol: float = NORM_TOL
    psd_tol: float = PSD_TOL
    json_out: Optional[str] = None
    quiet: bool = False
    verbose: bool = False
    debug: bool = False


global_state = GlobalState()


def handle_errors(func: Callable) -> Callable:
    """Turn ConcurrexError into an error panel and the matching exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConcurrexError as e:
            info = get_error_suggestions(e.exit_code)
            lines = [f"[red]{escape(str(e))}[/red]"]
            if e.invariant:
                lines.append(f"\n[bold]Invariant:[/bold] {e.invariant}")
            lines.append("\n[bold]Suggestions:[/bold]")
            lines.extend(f"  • {tip}" for tip in info["suggestions"])
            console.print(Panel(
                "\n".join(lines),
                title=f"❌ {info['title']}",
                border_style="red",
                box=box.ROUNDED
            ))
            if global_state.debug:
                console.print_exception()
            raise typer.Exit(code=e.exit_code)

    return wrapper


def command_seed(seed: Optional[int] = None) -> int:
    """Command-level --seed wins over the global flag; otherwise a fresh one."""
    return resolve_seed(seed if seed is not None else global_state.seed)


class CommandRun:
    """Report, warning capture and timing around one command body."""

    def __init__(self, command: str, **inputs: Any):
        self.report = RunReport(command=command, inputs=dict(inputs))
        self.report.inputs.setdefault("tol", global_state.tol)
        self._timer = timed(self.report)
        self._warnings = collect_warnings(self.report.warnings)

    def __enter__(self) -> RunReport:
        self._timer.__enter__()
        self._warnings.__enter__()
        return self.report

    def __exit__(self, exc_type, exc, tb):
        self._warnings.__exit__(exc_type, exc, tb)
        self._timer.__exit__(exc_type, exc, tb)
        if exc_type is None:
            emit(self.report, console, json_out=global_state.json_out, quiet=global_state.quiet)
        return False


def load_state(path: str, strict: bool = False) -> Union[PureState, DensityMatrix]:
    return read_state(path, tol=global_state.tol, strict=strict, psd_tol=global_state.psd_tol)


def family_from_spec(spec: str, seed: int) -> StateFamily:
    return parse_family_spec(spec, seed=seed)


def state_from_source(state_file: Optional[str], family_spec: Optional[str],
                      seed: int) -> Union[PureState, DensityMatrix]:
    """Exactly one of a state file or a --family spec."""
    if bool(state_file) == bool(family_spec):
        raise ParamError("give either a state file or --family, not both or neither")
    if state_file:
        return load_state(state_file)
    return make_family(family_from_spec(family_spec, seed))


def roof_settings(seed: int, **overrides):
    """RoofConfig from the user configuration plus command flags."""
    return roof_config_from(load_config(), rng_seed=seed, **overrides)
