import logging
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path
from typing import Any

import click

from isacase import _figures, _runner, _validation
from isacase.config import RunConfig, load_config
from isacase.netmodel import FormulaVariant, ResourceAllocation
from isacase.paretoopt import Method, Objective, timeshare_gain

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _parse_alloc(
    ctx: click.Context, param: click.Parameter, value: str | None
) -> ResourceAllocation | None:
    if value is None:
        return None
    try:
        k, l, j, q = (int(part) for part in value.split(","))  # noqa: E741
    except ValueError as error:
        raise click.BadParameter("expected four integers K,L,J,Q") from error
    return ResourceAllocation(k, l, j, q)


def _run_options[F: Callable[..., Any]](command: F) -> F:
    options = [
        click.option(
            "-c", "--config", "config_path", type=click.Path(path_type=Path), help="YAML config"
        ),
        click.option("--seed", type=click.INT, help="Override the Monte Carlo seed"),
        click.option("--trials", type=click.INT, help="Override the Monte Carlo trial count"),
        click.option(
            "--variant",
            type=click.Choice([variant.value for variant in FormulaVariant]),
            help="Formula variant",
        ),
        click.option("-o", "--out", type=click.Path(path_type=Path), help="Output directory"),
        click.option("-w", "--workers", type=click.INT, help="Worker processes"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _load(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
    alloc: ResourceAllocation | None = None,
) -> RunConfig:
    config = load_config(config_path).with_overrides(
        seed=seed,
        trials=trials,
        variant=FormulaVariant(variant) if variant else None,
        output_dir=out,
        workers=workers,
    )
    return replace(config, allocation=alloc) if alloc is not None else config


_TARGET = click.option(
    "-t",
    "--target",
    type=click.Choice([target.value for target in _runner.Target]),
    default=_runner.Target.BOTH.value,
    show_default=True,
)
_ALLOC = click.option("-a", "--alloc", callback=_parse_alloc, help="Allocation K,L,J,Q")


@click.group()
@click.version_option(None, "-v", "--version", package_name="isac-ase")
@click.option("--log-level", type=click.Choice(_LOG_LEVELS), default="WARNING", show_default=True)
def cli(log_level: str) -> None:
    """Cooperative ISAC area spectral efficiency CLI"""
    logging.basicConfig(level=log_level, format="%(levelname)s %(name)s: %(message)s")


@cli.command(name="eval")
@_run_options
@_TARGET
@_ALLOC
def eval_(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
    target: str,
    alloc: ResourceAllocation | None,
) -> None:
    """Evaluate the analytic rates and ASE of one allocation"""
    config = _load(config_path, seed, trials, variant, out, workers, alloc)
    record = _runner.evaluate(config, _runner.Target(target))

    click.echo(f"allocation (K, L, J, Q) = {record.alloc.as_tuple()} [{config.formula_variant}]")
    click.echo(f"r_c   = {_runner.bits(record.r_c)}")
    click.echo(f"r_s   = {_runner.bits(record.r_s)}")
    click.echo(f"t_c   = {_runner.bits(record.t_c)} per km^2")
    click.echo(f"t_s   = {_runner.bits(record.t_s)} per km^2")
    click.echo(f"t_sum = {_runner.bits(record.t_sum)} per km^2")


@cli.command()
@_run_options
@_TARGET
@_ALLOC
@click.option("--samples", type=click.Path(path_type=Path), help="Per-trial CSV sink")
def mc(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
    target: str,
    alloc: ResourceAllocation | None,
    samples: Path | None,
) -> None:
    """Estimate the per-link rates by Monte Carlo"""
    config = _load(config_path, seed, trials, variant, out, workers, alloc)
    estimates = _runner.monte_carlo(config, _runner.Target(target), samples)

    for kind, estimate in estimates.items():
        click.echo(
            f"{kind}: {_runner.bits(estimate.mean)} +- {estimate.half_width:.3g} "
            + f"({config.mc.ci_level:.0%} CI, {estimate.trials} trials, seed {estimate.seed})"
        )
        if estimate.capped:
            click.echo(f"{kind}: {estimate.capped} trial(s) with capped SIR")


@cli.command(name="boundary")
@_run_options
@click.option(
    "-m",
    "--method",
    type=click.Choice([*(method.value for method in Method), "slice_search"]),
    default=Method.ENUMERATE.value,
    show_default=True,
)
@click.option(
    "--objective",
    type=click.Choice([objective.value for objective in Objective]),
    default=Objective.ASE.value,
    show_default=True,
)
@click.option(
    "--strict-paper",
    "--strict-bisect",
    "strict_bisect",
    is_flag=True,
    default=False,
    help="Bisect over J(Q-1)",
)
def boundary_(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
    method: str,
    objective: str,
    strict_bisect: bool,
) -> None:
    """Trace the communication/sensing performance boundary"""
    config = _load(config_path, seed, trials, variant, out, workers)
    frontier = _runner.frontier(config, Method(method), Objective(objective), strict_bisect)

    for point in frontier.points:
        comm, sense = point.value(frontier.objective)
        click.echo(f"{point.alloc.as_tuple()}  comm={comm:.6g}  sense={sense:.6g}")
    click.echo(f"time-sharing gain: {timeshare_gain(frontier):.2%}")


@cli.command(name="figure")
@_run_options
@click.argument("figure", type=click.Choice([figure.value for figure in _figures.FigureId]))
@click.option("--mc/--no-mc", "with_mc", default=False, help="Add Monte Carlo columns (f4, f6, f7)")
def figure_(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
    figure: str,
    with_mc: bool,
) -> None:
    """Write the curve data of one result figure"""
    config = _load(config_path, seed, trials, variant, out, workers)
    data = _figures.build_figure(config, _figures.FigureId(figure), with_mc)

    click.echo(f"{figure}: {len(data.rows)} rows -> {config.output_dir / f'{figure}.csv'}")
    for name, value in data.notes.items():
        click.echo(f"{name} = {value:.6g}")


@cli.command()
@_run_options
def validate(
    config_path: Path | None,
    seed: int | None,
    trials: int | None,
    variant: str | None,
    out: Path | None,
    workers: int | None,
) -> None:
    """Run the acceptance suite"""
    config = _load(config_path, seed, trials, variant, out, workers)
    results = _validation.run_validation(config)

    for result in results:
        status = "PASS" if result.passed else ("FAIL" if result.hard else "WARN")
        value = "" if result.value is None else f"{result.value:.4g}"
        click.echo(f"{status:4}  {result.name:36} {value:>10}  {result.detail}")
    _validation.raise_on_failure(results)


if __name__ == "__main__":
    cli()
