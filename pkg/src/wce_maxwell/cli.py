"""Command line entry points.

Exit codes: 0 on success, 1 on configuration errors, 2 on solver failures.
"""
from __future__ import annotations

import sys
from dataclasses import replace

import click

from .config import ConfigError, parse_config
from .harness import HarnessError, run_experiment, write_outputs


def _load_config(path: str, mode: str | None, out: str | None, workers: int | None):
    try:
        with open(path) as fh:
            config = parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    overrides = {}
    if mode is not None:
        overrides["mode"] = mode
    if out is not None:
        overrides["output"] = out
    if workers is not None:
        overrides["workers"] = workers
    if overrides:
        config = replace(config, **overrides)
    return config


def _execute(config, slices: bool, plots: bool) -> None:
    report = run_experiment(config)
    manifest = write_outputs(report, config.output, slices=slices)
    if plots:
        from .plots import render_report

        manifest += render_report(report, config.output)
    for path in manifest:
        click.echo(path)


@click.group()
def main():
    """Chaos-expansion and Monte Carlo solvers for noise-driven Maxwell systems."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(),
              help="Path to a flat key=value experiment configuration.")
@click.option("--mode", type=click.Choice(["wce", "mc", "both"]), default=None,
              help="Override the configured estimator selection.")
@click.option("--out", type=click.Path(), default=None,
              help="Override the configured output directory.")
@click.option("--workers", type=int, default=None, help="Override the worker count.")
@click.option("--slices/--no-slices", default=False,
              help="Also write plane slices of 3D moment fields.")
@click.option("--plots/--no-plots", default=False,
              help="Render PNG figures next to the CSV output.")
def run(config_path, mode, out, workers, slices, plots):
    """Run the configured experiment and write its report."""
    try:
        config = _load_config(config_path, mode, out, workers)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    try:
        _execute(config, slices, plots)
    except HarnessError as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(2)


@main.command("scan-sigma")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--values", required=True,
              help="Comma-separated noise sizes, e.g. 0,0.1,0.5,1.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--workers", type=int, default=None)
@click.option("--plots/--no-plots", default=False)
def scan_sigma(config_path, values, out, workers, plots):
    """Run the energy-growth scan over a list of noise sizes."""
    try:
        config = _load_config(config_path, None, out, workers)
        try:
            scan = tuple(float(v) for v in values.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"--values: could not parse {values!r}")
        if not scan:
            raise ConfigError("--values: no noise sizes given")
        config = replace(config, sigma_scan=scan)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    try:
        _execute(config, slices=False, plots=plots)
    except HarnessError as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
