"""Command-line interface for the experiment harness.

Exit codes: 0 on success, 1 on configuration errors, 2 when at least one
run failed at runtime.
"""

from __future__ import annotations

import json
import sys

import click

from .benchmarks import BENCHMARKS
from .exceptions import ConfigError
from .harness import aggregate_directory, parse_config, run_experiment


@click.group()
def main():
    """Line Bayesian optimization benchmark harness."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False), help="Experiment INI file.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False), help="Output directory for traces.")
@click.option("--seeds", default=None, help="Comma-separated seed override.")
@click.option("--method", default=None, help="Method override.")
@click.option("--budget", default=None, type=int, help="Evaluation budget override.")
def run(config_path, out_dir, seeds, method, budget):
    """Run all seeded repetitions of an experiment and write trace files."""
    try:
        cfg = parse_config(config_path, seeds=seeds, method=method, budget=budget)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    summary = run_experiment(cfg, out_dir)
    click.echo(f"{summary['n_runs']} run(s) written to {out_dir}; "
               f"{summary['n_failed']} failed")
    for failure in summary["failures"]:
        click.echo(f"  seed {failure['seed']}: {failure['error']}", err=True)
    if summary["n_failed"]:
        sys.exit(2)


@main.command()
@click.option("--in", "in_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory containing trace CSV files.")
@click.option("--out", "out_file", required=True,
              type=click.Path(dir_okay=False), help="Aggregate JSON output path.")
def aggregate(in_dir, out_file):
    """Aggregate per-run traces into mean/median regret with standard errors."""
    try:
        result = aggregate_directory(in_dir)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    with open(out_file, "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(f"aggregated {result['n_runs']} trace(s) into {out_file}")


@main.command("list-benchmarks")
def list_benchmarks():
    """List the available benchmark objectives."""
    for name, builder in sorted(BENCHMARKS.items()):
        spec = builder() if name != "gaussian" else builder(10)
        extra = " (dim configurable)" if name == "gaussian" else ""
        click.echo(f"{name}: dim={spec.dim}{extra}, f_star={spec.f_star:.6g}")


if __name__ == "__main__":
    main()
