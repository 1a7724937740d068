"""Command-line experiment runner.

Thin layer over :mod:`telesim.experiments`: parse flags, validate the
configuration (collecting every violation), run the experiment, write the
artifact, and translate the internal pass/fail into the exit status.
"""
from __future__ import annotations

import sys

import click

from ._kernels import BACKEND
from .errors import ConfigError
from .experiments import (
    EXPERIMENT_CHAINS,
    EXPERIMENTS,
    OUTPUT_DIR_ENV,
    run,
    validate_config,
)
from .precision import GridMode

_HELP = (
    "Run one deterministic simulation experiment and write its artifact.\n"
    "\n"
    "Each experiment maps to exactly one operation chain:\n"
    "\n\b\n"
    + "\n".join(f"  {name}:\n      {chain}" for name, chain in EXPERIMENT_CHAINS.items())
    + "\n\n"
    "Artifacts go to --out when given, else to $" + OUTPUT_DIR_ENV + " (default:"
    " current directory) under a name derived from the configuration; re-running"
    " the same configuration and seed reproduces the artifact byte for byte."
    " Exit status: 0 = experiment checks passed, 1 = a check failed,"
    " 2 = invalid usage."
)


@click.command(name="telesim", help=_HELP)
@click.option("--experiment", required=True, type=click.Choice(EXPERIMENTS), help="Experiment to run.")
@click.option("--m", default=16, show_default=True, help="Preparation precision in bits.")
@click.option("--n", default=0, show_default=True, help="Truncated bits (sweep maximum for truncation_sweep).")
@click.option("--trials", default=1000, show_default=True, help="Monte Carlo trials; 0 selects the analytic path.")
@click.option("--seed", default=0, show_default=True, help="RNG seed; substreams derive from it per run index.")
@click.option(
    "--mode",
    default=GridMode.REAL_ROTATION.value,
    show_default=True,
    type=click.Choice([g.value for g in GridMode]),
    help="State grid: the real rotation circle or the general amplitude lattice.",
)
@click.option(
    "--format",
    "output_format",
    default="json",
    show_default=True,
    type=click.Choice(["json", "csv"]),
    help="Artifact format (JSON run log or the experiment's primary CSV table).",
)
@click.option("--out", "output_path", default=None, type=click.Path(), help="Explicit artifact path.")
@click.option("--verbose", is_flag=True, help="Also print the sampling backend in use.")
def main(experiment, m, n, trials, seed, mode, output_format, output_path, verbose):
    try:
        config = validate_config(
            {
                "experiment": experiment,
                "m": m,
                "n": n,
                "trials": trials,
                "seed": seed,
                "mode": mode,
                "output_format": output_format,
                "output_path": output_path,
            }
        )
    except ConfigError as exc:
        raise click.UsageError(str(exc))

    if verbose:
        click.echo(f"sampling backend: {BACKEND}")
    try:
        status, path = run(config)
    except OSError as exc:
        raise click.ClickException(f"cannot write artifact: {exc}")
    click.echo(f"{'PASS' if status == 0 else 'FAIL'} {config.experiment} -> {path}")
    sys.exit(status)


if __name__ == "__main__":
    main()
