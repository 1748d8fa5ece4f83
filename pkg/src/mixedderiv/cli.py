"""Command-line entry points.

Exit codes: 0 success, 1 configuration/usage error, 2 the constraint
reduction degenerated, 3 the time integrator failed, 4 a verification check
failed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import EQUATIONS, build_equation, make_initial_data
from .io import (
    BUILTIN_OPERATOR_LABELS,
    ConfigError,
    base_manifest,
    load_config,
    load_operator_set,
    write_manifest,
    write_simulation_outputs,
    write_error_curve_outputs,
)
from .grid import PeriodicGrid
from .timestepping import simulate
from .verify import SUITES, run_suites
from .wavenumber import build_error_curve

EXIT_CONFIG = 1
EXIT_DEGENERATE = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

STATUS_EXIT_CODES = {
    "completed": 0,
    "degenerate_abort": EXIT_DEGENERATE,
    "solver_failure": EXIT_SOLVER,
}


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(package_name="mixedderiv")
def main():
    """Reduce mixed-derivative evolution schemes to explicit ODEs and run them."""


@main.command(name="simulate")
@click.argument("config_path", metavar="CONFIG")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False),
              help="Directory for states.csv, monitors.csv, figures and manifest.json.")
def simulate_cmd(config_path: str, out_dir: str):
    """Run a simulation described by a JSON CONFIG file."""
    try:
        config = load_config(config_path)
        grid = PeriodicGrid(config.grid_size)
        eq = build_equation(config.equation_id, grid, **config.equation_params)
        u0 = make_initial_data(eq, config.initial_generator, **config.initial_params)
        record = simulate(eq, u0, dt=config.dt, t_final=config.t_final,
                          method=config.method, monitors=config.monitors,
                          stride=config.output_stride)
    except (ConfigError, ValueError, TypeError) as err:
        _fail(EXIT_CONFIG, str(err))

    write_simulation_outputs(record, out_dir, config=config)
    for warning in record.warnings:
        click.echo(f"warning: {warning}", err=True)
    status = record.status
    click.echo(f"{eq.name}: {status.kind} at t={status.time:g} "
               f"({len(record.times)} snapshots, {record.wall_seconds:.2f} s)")
    if status.detail:
        click.echo(status.detail, err=True)
    click.echo(f"outputs written to {Path(out_dir).resolve()}")
    sys.exit(STATUS_EXIT_CODES[status.kind])


@main.command(name="spectral-error")
@click.option("--ops", "ops_arg", default=",".join(BUILTIN_OPERATOR_LABELS),
              show_default=True,
              help="Comma-separated builtin operator labels, or a JSON stencil file.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="CSV path; the closed-form companion and figure land beside it.")
@click.option("--grid-size", default=512, show_default=True,
              help="Number of grid points used to sample the symbols.")
@click.option("--samples", default=200, show_default=True,
              help="Number of retained wavenumber samples in (0, 2*pi).")
def spectral_error(ops_arg: str, out_path: str, grid_size: int, samples: int):
    """Tabulate relative antiderivative errors per scaled wavenumber."""
    try:
        if grid_size < 2:
            raise ConfigError("--grid-size must be at least 2")
        pairs = load_operator_set(ops_arg, PeriodicGrid(grid_size))
        curve = build_error_curve(pairs, grid_size=grid_size, samples=samples)
    except (ConfigError, ValueError) as err:
        _fail(EXIT_CONFIG, str(err))

    written = write_error_curve_outputs(curve, out_path)
    for label, mismatch in sorted(curve.max_mismatch.items()):
        click.echo(f"{label}: closed-form mismatch {mismatch:.3e}")
    click.echo("wrote " + ", ".join(str(p) for p in written))


@main.command()
@click.argument("suite", default="all")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Optional JSON report path.")
def verify(suite: str, out_path: str | None):
    """Run a randomized check suite (or 'all'); see list of suites below.

    \b
    Suites: """ + ", ".join(sorted(SUITES)) + """
    Seed the generator with the MIXEDDERIV_SEED environment variable.
    """
    try:
        results = run_suites(suite)
    except (ConfigError, ValueError) as err:
        _fail(EXIT_CONFIG, str(err))

    for check in results:
        click.echo(check.line())
    failed = [check for check in results if not check.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")

    if out_path is not None:
        report = base_manifest()
        report.update({
            "suite": suite,
            "checks": [
                {"suite": check.suite, "name": check.name, "value": check.value,
                 "tolerance": check.tolerance, "passed": check.passed}
                for check in results
            ],
            "all_passed": not failed,
        })
        write_manifest(out_path, report)
        click.echo(f"report written to {Path(out_path).resolve()}")
    if failed:
        sys.exit(EXIT_VERIFY)


@main.command(name="list-equations")
@click.option("--json", "as_json", is_flag=True, help="Emit the catalog as JSON.")
def list_equations(as_json: bool):
    """List the equation catalog with parameters and expected behavior."""
    if as_json:
        catalog = {
            ident: {"summary": entry.summary,
                    "behavior": entry.expected_behavior,
                    "params": list(entry.param_names)}
            for ident, entry in sorted(EQUATIONS.items())
        }
        click.echo(json.dumps(catalog, indent=2))
        return
    width = max(len(ident) for ident in EQUATIONS)
    for ident, entry in sorted(EQUATIONS.items()):
        params = f"  params: {', '.join(entry.param_names)}" if entry.param_names else ""
        click.echo(f"{ident:<{width}}  [{entry.expected_behavior}]  "
                   f"{entry.summary}{params}")


if __name__ == "__main__":
    main()
