"""
Scan Command Module
Truncation-convergence scans with the trace-norm continuity certificate.
"""

from typing import List, Optional

import typer

from concurrex.channels import truncation_scan
from concurrex.commands.common import CommandRun, command_seed, family_from_spec, handle_errors
from concurrex.errors import ParamError
from concurrex.serialization import write_scan_csv


def register_scan_command(app: typer.Typer):
    """Register the scan command to the app."""
    app.command(name="scan")(scan_command)


def parse_dims(raw: str) -> List[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ParamError(f"--dims must be a comma-separated list of integers, got '{raw}'")


@handle_errors
def scan_command(
    family: str = typer.Option(..., "--family", "-f", help="two_mode_squeezed:r=... or product"),
    dims: str = typer.Option("2,4,8,16,32", "--dims", "-d", help="Increasing truncation sizes"),
    csv_out: str = typer.Option("scan.csv", "--csv-out", help="CSV output path"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (overrides the global --seed)"),
):
    """
    Concurrence across increasing truncations with |dC| <= sqrt(2) Tr|d rho|.

    Example:
        concurrex scan --family two_mode_squeezed:r=0.5 --dims 2,4,8,16
        concurrex scan --family product --dims 2,4 --csv-out product.csv
    """
    seed = command_seed(seed)
    with CommandRun("scan", family=family, dims=dims, seed=seed) as report:
        sizes = parse_dims(dims)
        scan = truncation_scan(family_from_spec(family, seed), sizes)
        path = write_scan_csv(csv_out, scan)
        report.results.update(
            dims=list(scan.dims),
            values=list(scan.values),
            trace_gaps=list(scan.trace_gaps),
            certified_bounds=list(scan.certified_bounds),
            deficits=list(scan.deficits),
            certificate="pass" if scan.certificate_ok else "fail",
            csv=str(path),
        )
        if scan.analytic_limit is not None:
            report.results["analytic_limit"] = scan.analytic_limit
            report.results["limit_gap"] = scan.limit_gap
