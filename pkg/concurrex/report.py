"""
Run Reports
The RunReport every command emits: resolved inputs (always including the
seed), a results map, captured warnings and wall time.
"""

import json
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

import numpy as np
from rich import box
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from concurrex.errors import InvariantBreach

UPPER_BOUND_LABEL = "roof estimate (upper bound)"


@dataclass
class RunReport:
    command: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    wall_time_ms: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": _plain(self.inputs),
            "results": _plain(self.results),
            "warnings": list(self.warnings),
            "wall_time_ms": int(self.wall_time_ms),
        }

    def ensure_complete(self):
        """Seed echoed and every numeric result finite."""
        if self.inputs.get("seed") is None:
            raise InvariantBreach("RunReport.seed", f"'{self.command}' report carries no seed")
        for path, value in _numbers(self.results, "results"):
            if not math.isfinite(value):
                raise InvariantBreach("RunReport.finite", f"{path} is {value}")

    def write_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")
        return path

    def render(self, console: Console):
        table = Table(title=f"concurrex {self.command}", box=box.ROUNDED)
        table.add_column("Result", style="cyan", no_wrap=True)
        table.add_column("Value", style="green")
        for key, value in _flatten(self.results):
            table.add_row(key, _display(value))
        console.print(table)
        seed = self.inputs.get("seed")
        console.print(f"[dim]seed {seed} · {self.wall_time_ms} ms[/dim]")
        for message in self.warnings:
            console.print(f"[yellow]⚠[/yellow]  {escape(message)}")


def _plain(value: Any) -> Any:
    """numpy scalars/arrays and tuples to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _numbers(value: Any, path: str) -> Iterator:
    if isinstance(value, dict):
        for key, item in value.items():
            yield from _numbers(item, f"{path}.{key}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        for index, item in enumerate(value):
            yield from _numbers(item, f"{path}[{index}]")
    elif isinstance(value, (float, np.floating)):
        yield path, float(value)


def _flatten(results: Dict[str, Any], prefix: str = "") -> Iterator:
    for key, value in results.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, f"{name}.")
        else:
            yield name, value


def _display(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if isinstance(value, (list, tuple, np.ndarray)):
        items = list(value)
        shown = ", ".join(_display(item) for item in items[:8])
        return f"[{shown}{', …' if len(items) > 8 else ''}]"
    return str(value)


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record: logging.LogRecord):
        self.messages.append(record.getMessage())


@contextmanager
def collect_warnings(target: List[str]):
    """Append WARNING records from the concurrex loggers to ``target``."""
    handler = _WarningCollector()
    package_logger = logging.getLogger("concurrex")
    package_logger.addHandler(handler)
    try:
        yield handler
    finally:
        package_logger.removeHandler(handler)
        target.extend(handler.messages)


@contextmanager
def timed(report: RunReport):
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.wall_time_ms = int(round((time.perf_counter() - start) * 1000))


def emit(report: RunReport, console: Console, json_out: Optional[str] = None, quiet: bool = False):
    """Validate, then print and/or write the report."""
    report.ensure_complete()
    if json_out:
        report.write_json(json_out)
    if not quiet:
        report.render(console)
        if json_out:
            console.print(f"[dim]Report written to {json_out}[/dim]")
