"""Curve data behind the result figures, one CSV per figure id."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import StrEnum

from isacase._csvio import Cell, write_csv
from isacase._runner import output_meta, rate_evaluator
from isacase.config import RunConfig
from isacase.exceptions import DomainError
from isacase.mcsim import mc_comm_rate, mc_radar_rate
from isacase.netmodel import NetworkParams, PerfPoint, ResourceAllocation, is_feasible
from isacase.paretoopt import Method, Objective, RateEvaluator, boundary, timeshare_gain

logger = logging.getLogger(__name__)

MAX_COMM_CLUSTER = 4
SENSING_RECEIVE_ANTENNAS = (10, 20, 40)
REGION_TRANSMIT_ANTENNAS = (20, 30, 40)


class FigureId(StrEnum):
    F4 = "f4"
    F5 = "f5"
    F6 = "f6"
    F7 = "f7"
    F9 = "f9"
    F11 = "f11"


FIGURE_HEADERS: dict[FigureId, tuple[str, ...]] = {
    FigureId.F4: ("k", "l", "r_c", "t_c", "t_s", "t_sum", "r_c_mc", "r_c_mc_half_width"),
    FigureId.F5: ("k", "best_l", "t_c", "argmax"),
    FigureId.F6: ("q", "j", "r_s", "t_s", "t_c", "t_sum", "r_s_mc", "r_s_mc_half_width"),
    FigureId.F7: ("m_r", "q", "j", "r_s", "t_s", "gain_vs_q1", "r_s_mc", "r_s_mc_half_width"),
    FigureId.F9: ("k", "l", "j", "q", "r_c", "r_s"),
    FigureId.F11: ("m_t", "k", "l", "j", "q", "t_c", "t_s", "timeshare_t_c"),
}

MC_FIGURES = frozenset({FigureId.F4, FigureId.F6, FigureId.F7})


@dataclass
class FigureData:
    header: tuple[str, ...]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)
    notes: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SensingPoint:
    q: int
    j: int
    perf: PerfPoint


def sensing_sweep(
    params: NetworkParams, evaluator: RateEvaluator, k: int = 1, l: int = 1  # noqa: E741
) -> list[SensingPoint]:
    """T_s against Q with J as large as the antenna budget and j_max allow."""
    sweep: list[SensingPoint] = []
    left = params.m_t - 1 - k * l
    for q in range(1, left + 2):
        j = params.j_max if q == 1 else min(params.j_max, left // (q - 1))
        alloc = ResourceAllocation(k, l, j, q)
        if j == 0 or not is_feasible(params, alloc):
            continue
        sweep.append(SensingPoint(q, j, evaluator.perf(alloc)))
    return sweep


def _sensing_mc(config: RunConfig, point: SensingPoint) -> tuple[Cell, Cell]:
    alloc = ResourceAllocation(1, 1, point.j, point.q)
    estimate = mc_radar_rate(config.network, alloc, config.mc, workers=config.workers)
    return estimate.mean, estimate.half_width


def _comm_curves(config: RunConfig, with_mc: bool) -> FigureData:
    params = config.network
    data = FigureData(FIGURE_HEADERS[FigureId.F4])
    with rate_evaluator(config) as evaluator:
        for l in range(1, MAX_COMM_CLUSTER + 1):  # noqa: E741
            for k in range(1, (params.m_t - 1) // l + 1):
                alloc = ResourceAllocation(k, l, params.j_max, 1)
                perf = evaluator.perf(alloc)
                mc_mean = mc_half = None
                if with_mc:
                    estimate = mc_comm_rate(params, alloc, config.mc, workers=config.workers)
                    mc_mean, mc_half = estimate.mean, estimate.half_width
                row = (k, l, perf.r_c, perf.t_c, perf.t_s, perf.t_sum, mc_mean, mc_half)
                data.rows.append(row)
    return data


def _best_cluster(config: RunConfig, with_mc: bool) -> FigureData:
    params = config.network
    data = FigureData(FIGURE_HEADERS[FigureId.F5])
    best: list[tuple[int, int, float]] = []
    with rate_evaluator(config) as evaluator:
        for k in range(1, params.m_t):
            options = [
                (evaluator.perf(ResourceAllocation(k, l, 0, 1)).t_c, l)
                for l in range(1, (params.m_t - 1) // k + 1)  # noqa: E741
            ]
            t_c, l = max(options, key=lambda option: (option[0], -option[1]))  # noqa: E741
            best.append((k, l, t_c))

    top = max(best, key=lambda entry: entry[2])
    for k, l, t_c in best:  # noqa: E741
        data.rows.append((k, l, t_c, (k, l) == top[:2]))
    data.notes = {"argmax_k": top[0], "argmax_l": top[1], "k_ratio": top[0] / params.m_t}
    return data


def _sensing_curves(config: RunConfig, with_mc: bool) -> FigureData:
    params = config.network
    data = FigureData(FIGURE_HEADERS[FigureId.F6])
    with rate_evaluator(config) as evaluator:
        sweep = sensing_sweep(params, evaluator)
    for point in sweep:
        mc_mean, mc_half = _sensing_mc(config, point) if with_mc else (None, None)
        perf = point.perf
        data.rows.append(
            (point.q, point.j, perf.r_s, perf.t_s, perf.t_c, perf.t_sum, mc_mean, mc_half)
        )
    return data


def _receive_antenna_sweep(config: RunConfig, with_mc: bool) -> FigureData:
    data = FigureData(FIGURE_HEADERS[FigureId.F7])
    for m_r in SENSING_RECEIVE_ANTENNAS:
        variant = replace(config, network=config.network.with_(m_r=m_r))
        with rate_evaluator(variant) as evaluator:
            sweep = sensing_sweep(variant.network, evaluator)

        baseline = next(point.perf.t_s for point in sweep if point.q == 1)
        for point in sweep:
            gain = point.perf.t_s / baseline if baseline else None
            mc = _sensing_mc(variant, point) if with_mc else (None, None)
            data.rows.append((m_r, point.q, point.j, point.perf.r_s, point.perf.t_s, gain, *mc))
        if baseline:
            data.notes[f"gain_m_r_{m_r}"] = max(point.perf.t_s for point in sweep) / baseline
    return data


def _rate_frontier(config: RunConfig, with_mc: bool) -> FigureData:
    data = FigureData(FIGURE_HEADERS[FigureId.F9])
    with rate_evaluator(config) as evaluator:
        result = boundary(config.network, evaluator, Method.ENUMERATE, Objective.RATE)
    for point in result.points:
        data.rows.append((*point.alloc.as_tuple(), point.perf.r_c, point.perf.r_s))
    return data


def _region(config: RunConfig, with_mc: bool) -> FigureData:
    data = FigureData(FIGURE_HEADERS[FigureId.F11])
    for m_t in REGION_TRANSMIT_ANTENNAS:
        variant = replace(config, network=config.network.with_(m_t=m_t))
        with rate_evaluator(variant) as evaluator:
            result = boundary(variant.network, evaluator, Method.ENUMERATE)

        comm, sense = result.corners
        span = sense.perf.t_s - comm.perf.t_s
        for point in result.points:
            shared = None
            if span > 0:
                weight = (sense.perf.t_s - point.perf.t_s) / span
                shared = weight * comm.perf.t_c + (1 - weight) * sense.perf.t_c
            row = (m_t, *point.alloc.as_tuple(), point.perf.t_c, point.perf.t_s, shared)
            data.rows.append(row)
        data.notes[f"timeshare_gain_m_t_{m_t}"] = timeshare_gain(result)
    return data


_BUILDERS: dict[FigureId, Callable[[RunConfig, bool], FigureData]] = {
    FigureId.F4: _comm_curves,
    FigureId.F5: _best_cluster,
    FigureId.F6: _sensing_curves,
    FigureId.F7: _receive_antenna_sweep,
    FigureId.F9: _rate_frontier,
    FigureId.F11: _region,
}


def build_figure(config: RunConfig, figure: FigureId, with_mc: bool = False) -> FigureData:
    if with_mc and figure not in MC_FIGURES:
        raise DomainError(f"figure {figure} has no Monte Carlo overlay")
    data = _BUILDERS[figure](config, with_mc)
    meta = output_meta(config, f"figure {figure}")
    write_csv(config.output_dir / f"{figure}.csv", data.header, data.rows, meta)
    for name, value in data.notes.items():
        logger.info("%s %s = %.6g", figure, name, value)
    return data
