import logging
import math
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

from isacase._csvio import Cell, write_csv
from isacase.commrate import avg_comm_rate
from isacase.config import RunConfig
from isacase.exceptions import AllocationError, DomainError
from isacase.mcsim import McEstimate, mc_comm_rate, mc_radar_rate
from isacase.netmodel import PerfPoint, ResourceAllocation, validate
from isacase.paretoopt import (
    AnalyticModel,
    Frontier,
    Method,
    Objective,
    RateEvaluator,
    boundary,
    timeshare_gain,
)
from isacase.rate_cache import RateCache
from isacase.senserate import avg_radar_rate

logger = logging.getLogger(__name__)

EVAL_HEADER = ("target", "variant", "k", "l", "j", "q", "r_c", "r_s", "t_c", "t_s", "t_sum")
MC_HEADER = (
    "target",
    "k",
    "l",
    "j",
    "q",
    "mean",
    "half_width",
    "ci_level",
    "trials",
    "seed",
    "window_factor",
    "half_window_mean",
    "truncation_shift",
    "capped",
    "resampled",
)
BOUNDARY_HEADER = ("k", "l", "j", "q", "r_c", "r_s", "t_c", "t_s", "t_sum", "on_frontier", "method")


class Target(StrEnum):
    COMM = "comm"
    SENSE = "sense"
    BOTH = "both"


@dataclass(frozen=True)
class EvalRecord:
    target: Target
    alloc: ResourceAllocation
    r_c: float | None
    r_s: float | None
    t_c: float | None
    t_s: float | None

    @property
    def t_sum(self) -> float | None:
        if self.t_c is None or self.t_s is None:
            return None
        return self.t_c + self.t_s


def output_meta(config: RunConfig, command: str) -> dict[str, Cell]:
    return {"command": command, "seed": config.mc.seed, "config": config.fingerprint()}


def require_allocation(config: RunConfig) -> ResourceAllocation:
    if config.allocation is None:
        raise DomainError("this command needs an [allocation] section or --alloc")

    violations = validate(config.network, config.allocation)
    if violations:
        raise AllocationError(violations)
    return config.allocation


@contextmanager
def rate_evaluator(config: RunConfig) -> Iterator[RateEvaluator]:
    """Evaluator over the analytic model, backed by the on-disk cache when one is configured."""
    cache = RateCache.open(config.cache_dir) if config.cache_dir is not None else None
    model = AnalyticModel(config.network, config.quadrature.for_sweep(), config.formula_variant)
    try:
        yield RateEvaluator(model, config.network, cache, config.workers)
    finally:
        if cache is not None:
            cache.save()


def evaluate(config: RunConfig, target: Target) -> EvalRecord:
    alloc = require_allocation(config)
    params, spec, variant = config.network, config.quadrature, config.formula_variant

    r_c = t_c = r_s = t_s = None
    if target in (Target.COMM, Target.BOTH):
        r_c = avg_comm_rate(params, alloc, spec, variant)
        t_c = params.lambda_b * alloc.k * r_c
    if target in (Target.SENSE, Target.BOTH):
        r_s = avg_radar_rate(params, alloc, spec, variant)
        t_s = params.lambda_b * alloc.j * r_s

    record = EvalRecord(target, alloc, r_c, r_s, t_c, t_s)
    row: Sequence[Cell] = (
        target.value,
        variant.value,
        *alloc.as_tuple(),
        r_c,
        r_s,
        t_c,
        t_s,
        record.t_sum,
    )
    write_csv(config.output_dir / "eval.csv", EVAL_HEADER, [row], output_meta(config, "eval"))
    return record


def monte_carlo(
    config: RunConfig, target: Target, samples_path: Path | None = None
) -> dict[Target, McEstimate]:
    alloc = require_allocation(config)
    params, mc = config.network, config.mc

    estimates: dict[Target, McEstimate] = {}
    if target in (Target.COMM, Target.BOTH):
        path = samples_path.with_name(f"{samples_path.stem}_comm.csv") if samples_path else None
        estimates[Target.COMM] = mc_comm_rate(
            params, alloc, mc, workers=config.workers, samples_path=path
        )
    if target in (Target.SENSE, Target.BOTH):
        path = samples_path.with_name(f"{samples_path.stem}_sense.csv") if samples_path else None
        estimates[Target.SENSE] = mc_radar_rate(
            params, alloc, mc, workers=config.workers, samples_path=path
        )

    rows = [
        (
            kind.value,
            *alloc.as_tuple(),
            estimate.mean,
            estimate.half_width,
            mc.ci_level,
            estimate.trials,
            estimate.seed,
            mc.window_radius_factor,
            estimate.half_window_mean,
            estimate.truncation_shift,
            estimate.capped,
            estimate.resampled,
        )
        for kind, estimate in estimates.items()
    ]
    write_csv(config.output_dir / "mc.csv", MC_HEADER, rows, output_meta(config, "mc"))
    return estimates


def perf_row(alloc: ResourceAllocation, perf: PerfPoint) -> tuple[Cell, ...]:
    return (*alloc.as_tuple(), perf.r_c, perf.r_s, perf.t_c, perf.t_s, perf.t_sum)


def frontier(
    config: RunConfig,
    method: Method,
    objective: Objective = Objective.ASE,
    strict_bisect: bool = False,
) -> Frontier:
    with rate_evaluator(config) as evaluator:
        result = boundary(config.network, evaluator, method, objective, strict_bisect)

    rows = [
        (*perf_row(point.alloc, point.perf), result.on_frontier(point), method.value)
        for point in result.candidates
    ]
    meta = output_meta(config, "boundary")
    write_csv(config.output_dir / "boundary.csv", BOUNDARY_HEADER, rows, meta)

    gain = timeshare_gain(result)
    logger.info("time-sharing gain of the %s frontier: %.4f", method, gain)
    return result


def bits(nats: float | None) -> str:
    if nats is None:
        return "-"
    return f"{nats:.6g} nats ({nats / math.log(2):.6g} bits)"
