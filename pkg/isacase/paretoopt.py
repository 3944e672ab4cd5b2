"""Communication/sensing performance region over integer allocations (K, L, J, Q).

Per-link rates depend on few integers: r_c on (K, L, nu) with nu = J(Q - 1) and r_s on (K, Q).
`RateEvaluator` memoises them under those keys, so a sweep over thousands of allocations
costs only a few hundred quadratures.
"""

import json
import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from typing import Protocol, override

from isacase.commrate import avg_comm_rate
from isacase.exceptions import DomainError
from isacase.mathkern import QuadratureSpec
from isacase.netmodel import (
    FormulaVariant,
    NetworkParams,
    PerfPoint,
    ResourceAllocation,
    enumerate_feasible,
    params_violations,
)
from isacase.rate_cache import RateCache, cache_key
from isacase.senserate import avg_radar_rate

logger = logging.getLogger(__name__)


class Method(StrEnum):
    ENUMERATE = "enumerate"
    PAPER_SEARCH = "paper_search"

    @override
    @classmethod
    def _missing_(cls, value: object) -> "Method | None":
        # older name of the per-slice search
        return cls.PAPER_SEARCH if value == "slice_search" else None


class Objective(StrEnum):
    ASE = "ase"
    RATE = "rate"


class RateModel(Protocol):
    def comm_rate(self, k: int, l: int, nu: int) -> float: ...  # noqa: E741

    def sense_rate(self, k: int, q: int) -> float: ...

    def fingerprint(self) -> str: ...


@dataclass(frozen=True)
class AnalyticModel:
    params: NetworkParams
    spec: QuadratureSpec = QuadratureSpec()
    variant: FormulaVariant = FormulaVariant.REDERIVED

    def comm_rate(self, k: int, l: int, nu: int) -> float:  # noqa: E741
        alloc = ResourceAllocation(k, l, 1, nu + 1) if nu else ResourceAllocation(k, l, 0, 1)
        return avg_comm_rate(self.params, alloc, self.spec, self.variant)

    def sense_rate(self, k: int, q: int) -> float:
        return avg_radar_rate(self.params, ResourceAllocation(k, 1, 1, q), self.spec, self.variant)

    def fingerprint(self) -> str:
        document = {
            "params": asdict(self.params),
            "spec": asdict(self.spec),
            "variant": self.variant.value,
        }
        return json.dumps(document, sort_keys=True)


type _RateKey = tuple[str, tuple[int, ...]]


def _evaluate(model: RateModel, key: _RateKey) -> float:
    kind, args = key
    match kind:
        case "comm":
            return model.comm_rate(*args)
        case _:
            return model.sense_rate(*args)


@dataclass
class RateEvaluator:
    model: RateModel
    params: NetworkParams
    cache: RateCache | None = None
    workers: int = 1
    _memo: dict[_RateKey, float] = field(default_factory=dict, init=False, repr=False)

    @staticmethod
    def _keys(alloc: ResourceAllocation) -> list[_RateKey]:
        keys: list[_RateKey] = []
        if alloc.k:
            keys.append(("comm", (alloc.k, alloc.l, alloc.nu)))
            if alloc.j:
                keys.append(("sense", (alloc.k, alloc.q)))
        return keys

    def _cached(self, key: _RateKey) -> float | None:
        if key in self._memo:
            return self._memo[key]
        if self.cache is None:
            return None

        value = self.cache.lookup(cache_key(key[0], key[1], self.model.fingerprint()))
        if value is not None:
            self._memo[key] = value
        return value

    def _store(self, key: _RateKey, value: float) -> None:
        self._memo[key] = value
        if self.cache is not None:
            self.cache.define(cache_key(key[0], key[1], self.model.fingerprint()), value)

    def _rate(self, key: _RateKey) -> float:
        value = self._cached(key)
        if value is None:
            value = _evaluate(self.model, key)
            self._store(key, value)
        return value

    def prefetch(self, allocs: Iterable[ResourceAllocation]) -> None:
        """Evaluate every missing rate, in parallel when `workers > 1`."""
        missing = sorted(
            {key for alloc in allocs for key in self._keys(alloc) if self._cached(key) is None}
        )
        if not missing:
            return

        logger.info("evaluating %d rates with %d worker(s)", len(missing), self.workers)
        if self.workers <= 1:
            values = [_evaluate(self.model, key) for key in missing]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                values = list(pool.map(_evaluate, [self.model] * len(missing), missing))

        for key, value in zip(missing, values, strict=True):
            self._store(key, value)

    def comm_rate(self, k: int, l: int, nu: int) -> float:  # noqa: E741
        return self._rate(("comm", (k, l, nu))) if k else 0.0

    def sense_rate(self, k: int, q: int) -> float:
        return self._rate(("sense", (k, q))) if k else 0.0

    def perf(self, alloc: ResourceAllocation) -> PerfPoint:
        r_c = self.comm_rate(alloc.k, alloc.l, alloc.nu)
        r_s = self.sense_rate(alloc.k, alloc.q) if alloc.j else 0.0
        return PerfPoint.from_rates(self.params, alloc, r_c, r_s)


@dataclass(frozen=True)
class BoundaryPoint:
    alloc: ResourceAllocation
    perf: PerfPoint

    def value(self, objective: Objective) -> tuple[float, float]:
        """(communication, sensing) coordinates under `objective`."""
        match objective:
            case Objective.ASE:
                return self.perf.t_c, self.perf.t_s
            case Objective.RATE:
                return self.perf.r_c, self.perf.r_s


@dataclass(frozen=True)
class Frontier:
    """Pareto-optimal points sorted by increasing communication value."""

    points: tuple[BoundaryPoint, ...]
    corners: tuple[BoundaryPoint, BoundaryPoint]
    method: Method
    objective: Objective
    candidates: tuple[BoundaryPoint, ...] = ()

    def timeshare(self) -> Callable[[float], PerfPoint]:
        return timeshare_bound(self.corners)

    def sense_at(self, comm: float) -> float:
        """Best sensing value among frontier points whose communication value is at least `comm`."""
        values = [point.value(self.objective) for point in self.points]
        return max((sense for value, sense in values if value >= comm), default=0.0)

    def on_frontier(self, point: BoundaryPoint) -> bool:
        return point in self.points


def pareto_filter(
    points: Iterable[BoundaryPoint], objective: Objective = Objective.ASE
) -> tuple[BoundaryPoint, ...]:
    """Points not strictly dominated by another, one per value pair, sorted by communication."""

    def order(point: BoundaryPoint) -> tuple[float, float, tuple[int, int, int, int]]:
        comm, sense = point.value(objective)
        return -comm, -sense, point.alloc.as_tuple()

    kept: list[BoundaryPoint] = []
    best_sense = float("-inf")
    for point in sorted(points, key=order):
        sense = point.value(objective)[1]
        if sense > best_sense:
            kept.append(point)
            best_sense = sense

    return tuple(reversed(kept))


def _require_valid(params: NetworkParams) -> None:
    violations = params_violations(params)
    if violations:
        names = ", ".join(violation.constraint for violation in violations)
        raise DomainError(f"invalid network parameters ({names})")


def _best(
    evaluator: RateEvaluator,
    allocs: Sequence[ResourceAllocation],
    key: Callable[[BoundaryPoint], tuple[float, ...]],
) -> BoundaryPoint:
    """First allocation, in enumeration order, maximising `key`."""
    evaluator.prefetch(allocs)
    best: BoundaryPoint | None = None
    for alloc in allocs:
        point = BoundaryPoint(alloc, evaluator.perf(alloc))
        if best is None or key(point) > key(best):
            best = point

    if best is None:
        raise DomainError("no feasible allocation to choose from")
    return best


def corner_comm_max(
    params: NetworkParams, evaluator: RateEvaluator, objective: Objective = Objective.ASE
) -> BoundaryPoint:
    """Best communication value with Q = 1; the free J breaks ties on sensing."""
    _require_valid(params)
    allocs = [alloc for alloc in enumerate_feasible(params) if alloc.q == 1]
    return _best(evaluator, allocs, lambda point: point.value(objective))


def corner_sense_max(
    params: NetworkParams, evaluator: RateEvaluator, objective: Objective = Objective.ASE
) -> BoundaryPoint:
    """Best sensing value with L = 1; the free K breaks ties on communication."""
    _require_valid(params)
    allocs = [alloc for alloc in enumerate_feasible(params) if alloc.l == 1]
    return _best(evaluator, allocs, lambda point: point.value(objective)[::-1])


def _slices(params: NetworkParams) -> dict[int, list[ResourceAllocation]]:
    """Feasible allocations grouped by nu = J(Q - 1), in enumeration order."""
    slices: dict[int, list[ResourceAllocation]] = {}
    for alloc in enumerate_feasible(params):
        slices.setdefault(alloc.nu, []).append(alloc)
    return slices


def _search_at(
    evaluator: RateEvaluator, allocs: Sequence[ResourceAllocation], objective: Objective
) -> list[BoundaryPoint]:
    """Comm-first and sense-first choices within one nu slice.

    Comm-first takes the best (K, L) and then the best (J, Q) for it; sense-first takes the
    best (K, J, Q) and then the best L for that K.
    """
    comm_first = _best(evaluator, allocs, lambda point: point.value(objective))
    sense_first = _best(evaluator, allocs, lambda point: point.value(objective)[::-1])
    return [comm_first, sense_first]


def _binary_search(
    evaluator: RateEvaluator,
    slices: dict[int, list[ResourceAllocation]],
    objective: Objective,
) -> dict[int, list[BoundaryPoint]]:
    """Visit nu by bisection, assuming the best sensing value is unimodal in nu."""
    visited: dict[int, list[BoundaryPoint]] = {}

    def score(nu: int) -> float:
        if nu not in visited:
            visited[nu] = _search_at(evaluator, slices[nu], objective)
        return visited[nu][1].value(objective)[1]

    nus = sorted(slices)
    low, high = 0, len(nus) - 1
    while low < high:
        middle = (low + high) // 2
        if score(nus[middle]) < score(nus[middle + 1]):
            low = middle + 1
        else:
            high = middle
    score(nus[low])
    return visited


def boundary(
    params: NetworkParams,
    evaluator: RateEvaluator,
    method: Method = Method.ENUMERATE,
    objective: Objective = Objective.ASE,
    strict_bisect: bool = False,
) -> Frontier:
    _require_valid(params)

    match method:
        case Method.ENUMERATE:
            allocs = enumerate_feasible(params)
            evaluator.prefetch(allocs)
            candidates = [BoundaryPoint(alloc, evaluator.perf(alloc)) for alloc in allocs]
        case Method.PAPER_SEARCH:
            slices = _slices(params)
            if strict_bisect:
                visited = _binary_search(evaluator, slices, objective)
            else:
                visited = {nu: _search_at(evaluator, slices[nu], objective) for nu in slices}
            candidates = [point for nu in sorted(visited) for point in visited[nu]]
            candidates.append(corner_comm_max(params, evaluator, objective))
            candidates.append(corner_sense_max(params, evaluator, objective))

    points = pareto_filter(candidates, objective)
    logger.info("%s frontier: %d of %d candidates", method, len(points), len(candidates))
    return Frontier(
        points=points,
        corners=(points[-1], points[0]),
        method=method,
        objective=objective,
        candidates=tuple(candidates),
    )


def timeshare_bound(corners: tuple[BoundaryPoint, BoundaryPoint]) -> Callable[[float], PerfPoint]:
    """t -> t * comm corner + (1 - t) * sense corner, for t in [0, 1]."""
    comm, sense = corners

    def sample(weight: float) -> PerfPoint:
        if not 0 <= weight <= 1:
            raise DomainError(f"time-sharing weight must lie in [0, 1], got {weight}")
        return comm.perf.mix(sense.perf, weight)

    return sample


def timeshare_gain(frontier: Frontier) -> float:
    """Largest relative communication gain of the frontier over time-sharing at equal sensing."""
    comm, sense = frontier.corners
    comm_c, comm_s = comm.value(frontier.objective)
    sense_c, sense_s = sense.value(frontier.objective)
    if sense_s <= comm_s:
        return 0.0

    gain = 0.0
    for point in frontier.points:
        value_c, value_s = point.value(frontier.objective)
        weight = (sense_s - value_s) / (sense_s - comm_s)
        if not 0 <= weight <= 1:
            continue
        shared = weight * comm_c + (1 - weight) * sense_c
        if shared > 0:
            gain = max(gain, value_c / shared - 1)
    return gain
