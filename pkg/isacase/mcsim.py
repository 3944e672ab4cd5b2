"""Monte Carlo oracle for the analytical evaluators.

BS positions are a PPP in a disk of radius `window_radius_factor / sqrt(lambda_b)` around the
typical user or target. Trials are grouped into blocks; block `b` draws from its own stream
`default_rng([seed, stream, b])` and partial sums are merged in block order, so results do not
depend on the number of worker processes.
"""

import functools
import logging
import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from isacase._csvio import write_csv
from isacase.exceptions import DomainError, EmptyRealization, RankDeficiency
from isacase.netmodel import NetworkParams, ResourceAllocation, validate

logger = logging.getLogger(__name__)

type FloatArray = NDArray[np.float64]
type IndexArray = NDArray[np.intp]
type ComplexArray = NDArray[np.complex128]

SIR_CAP = 1e12
SAMPLE_HEADER = ("trial", "R", "SIR", "rate")

_MIN_WINDOW_FACTOR = 5.0
_RANK_TOLERANCE = 1e-10


class _Stream(IntEnum):
    COMM = 1
    SENSE = 2
    LAPLACE = 3
    ETA = 4
    NEAREST = 5
    RQ_RATIO = 6
    CHANNEL = 7


class ClusterMode(StrEnum):
    COMM = "comm"
    SENSE = "sense"


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 20240917
    window_radius_factor: float = 20.0
    ci_level: float = 0.99
    block_size: int = 2_000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.window_radius_factor < _MIN_WINDOW_FACTOR:
            factor = self.window_radius_factor
            raise DomainError(f"window_radius_factor must be at least 5, got {factor}")
        if not 0 < self.ci_level < 1:
            raise DomainError(f"ci_level must lie in (0, 1), got {self.ci_level}")
        if self.block_size < 1:
            raise DomainError(f"block_size must be at least 1, got {self.block_size}")

    def window_radius(self, lambda_b: float) -> float:
        return self.window_radius_factor / math.sqrt(lambda_b)

    def blocks(self) -> list[tuple[int, int]]:
        """(block index, trials in block) pairs covering every trial."""
        full, rest = divmod(self.trials, self.block_size)
        sizes = [self.block_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))

    def rng(self, stream: int, block: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream, block])


@dataclass(frozen=True, eq=False)
class PppRealization:
    """One BS geometry around the typical point at the origin.

    `cluster_indices` starts with the serving BS. For the communication mode the rest of the
    cluster is ordered by distance to the origin, for the sensing mode by distance to the serving
    BS. Cluster and interferers partition the points.
    """

    points: FloatArray
    serving_index: int
    cluster_indices: IndexArray
    interferer_indices: IndexArray

    @property
    def radii(self) -> FloatArray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def serving_distance(self) -> float:
        return float(np.hypot(*self.points[self.serving_index]))

    def distances_to_serving(self) -> FloatArray:
        offsets = self.points - self.points[self.serving_index]
        return np.hypot(offsets[:, 0], offsets[:, 1])


def _partition(
    points: FloatArray, serving: int, mode: ClusterMode, cluster_size: int
) -> PppRealization:
    match mode:
        case ClusterMode.COMM:
            order = np.argsort(np.hypot(points[:, 0], points[:, 1]), kind="stable")
            cluster, interferers = order[:cluster_size], order[cluster_size:]
        case ClusterMode.SENSE:
            offsets = points - points[serving]
            order = np.argsort(np.hypot(offsets[:, 0], offsets[:, 1]), kind="stable")
            order = order[order != serving]
            members = cluster_size - 1
            cluster = np.concatenate(([serving], order[:members])).astype(np.intp)
            interferers = order[members:]
    return PppRealization(points, serving, cluster, interferers)


def sample_ppp(
    lambda_b: float,
    window_radius: float,
    rng: np.random.Generator,
    mode: ClusterMode = ClusterMode.COMM,
    cluster_size: int = 1,
) -> PppRealization:
    if window_radius <= 0:
        raise DomainError(f"window radius must be positive, got {window_radius}")
    if cluster_size < 1:
        raise DomainError(f"cluster size must be at least 1, got {cluster_size}")

    count = int(rng.poisson(lambda_b * math.pi * window_radius**2))
    if count == 0:
        raise EmptyRealization(f"no BS in a window of radius {window_radius}")

    radii = window_radius * np.sqrt(rng.random(count))
    angles = 2 * math.pi * rng.random(count)
    points = np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))
    return _partition(points, int(np.argmin(radii)), mode, cluster_size)


def sample_ppp_conditioned(
    lambda_b: float,
    window_radius: float,
    serving_distance: float,
    rng: np.random.Generator,
    cluster_size: int = 1,
) -> PppRealization:
    """Sensing geometry given the serving distance.

    The serving BS sits at (R, 0); the other BSs form a PPP on the window minus the hole disk.
    """
    if not 0 < serving_distance < window_radius:
        raise DomainError(
            f"serving distance must lie in (0, {window_radius}), got {serving_distance}"
        )

    inner, outer = serving_distance**2, window_radius**2
    count = int(rng.poisson(lambda_b * math.pi * (outer - inner)))
    radii = np.sqrt(inner + (outer - inner) * rng.random(count))
    angles = 2 * math.pi * rng.random(count)
    points = np.vstack(
        ([serving_distance, 0.0], np.column_stack((radii * np.cos(angles), radii * np.sin(angles))))
    )
    return _partition(points, 0, ClusterMode.SENSE, cluster_size)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width: float
    trials: int
    seed: int
    capped: int = 0
    resampled: int = 0
    half_window_mean: float | None = None

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high

    @classmethod
    def idle(cls, mc: McConfig) -> "McEstimate":
        """Zero rate of a link that carries no stream; nothing is sampled."""
        return cls(mean=0.0, half_width=0.0, trials=0, seed=mc.seed, half_window_mean=0.0)

    @property
    def truncation_shift(self) -> float | None:
        """Relative change of the mean when interferers beyond half the window are dropped."""
        if self.half_window_mean is None or self.mean == 0:
            return None
        return (self.mean - self.half_window_mean) / self.mean


@dataclass
class _Partial:
    n: int = 0
    total: float = 0.0
    total_sq: float = 0.0
    half_window_total: float = 0.0
    capped: int = 0
    resampled: int = 0
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)

    def add(self, value: float, half_window: float) -> None:
        self.n += 1
        self.total += value
        self.total_sq += value * value
        self.half_window_total += half_window

    def merge(self, other: "_Partial") -> "_Partial":
        return _Partial(
            n=self.n + other.n,
            total=self.total + other.total,
            total_sq=self.total_sq + other.total_sq,
            half_window_total=self.half_window_total + other.half_window_total,
            capped=self.capped + other.capped,
            resampled=self.resampled + other.resampled,
            rows=self.rows + other.rows,
        )

    def estimate(self, mc: McConfig) -> McEstimate:
        mean = self.total / self.n
        half_width = 0.0
        if self.n > 1:
            variance = max(self.total_sq - self.n * mean * mean, 0.0) / (self.n - 1)
            quantile = float(stats.norm.ppf(0.5 + mc.ci_level / 2))
            half_width = quantile * math.sqrt(variance / self.n)

        if self.capped:
            logger.warning("%d of %d trials had a capped SIR", self.capped, self.n)
        if self.resampled:
            logger.info("resampled %d empty realisations", self.resampled)

        return McEstimate(
            mean=mean,
            half_width=half_width,
            trials=self.n,
            seed=mc.seed,
            capped=self.capped,
            resampled=self.resampled,
            half_window_mean=self.half_window_total / self.n,
        )


def _map_blocks[T](task: Callable[[int, int], T], mc: McConfig, workers: int) -> list[T]:
    indices, sizes = zip(*mc.blocks(), strict=True)
    if workers <= 1 or len(indices) == 1:
        return list(map(task, indices, sizes))

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, indices, sizes))


def _reduce_blocks(task: Callable[[int, int], _Partial], mc: McConfig, workers: int) -> _Partial:
    return functools.reduce(_Partial.merge, _map_blocks(task, mc, workers), _Partial())


def _draw[T](sampler: Callable[[], T], partial: _Partial) -> T:
    while True:
        try:
            return sampler()
        except EmptyRealization:
            partial.resampled += 1


class _Trial(NamedTuple):
    serving_distance: float
    signal: float
    interference: float
    half_window_interference: float


def _comm_trial(
    params: NetworkParams,
    alloc: ResourceAllocation,
    window: float,
    rng: np.random.Generator,
    signal_shape: float,
) -> _Trial:
    ppp = sample_ppp(params.lambda_b, window, rng, ClusterMode.COMM, alloc.l)
    radii = ppp.radii
    r = float(radii[ppp.serving_index])

    signal = float(rng.gamma(signal_shape)) * r**-params.alpha
    far = radii[ppp.interferer_indices]
    powers = rng.gamma(alloc.k, size=far.size) * far**-params.alpha
    near = powers[far <= window / 2]
    return _Trial(r, signal, float(powers.sum()), float(near.sum()))


def _sense_trial(
    params: NetworkParams,
    alloc: ResourceAllocation,
    window: float,
    rng: np.random.Generator,
    signal_shape: float,
) -> _Trial:
    ppp = sample_ppp(params.lambda_b, window, rng, ClusterMode.SENSE, alloc.q)
    r = ppp.serving_distance

    signal = params.sensing_gain * float(rng.gamma(signal_shape)) * r ** (-2 * params.beta)
    links = ppp.distances_to_serving()[ppp.interferer_indices]
    powers = rng.gamma(alloc.k, size=links.size) * links**-params.alpha
    near = powers[ppp.radii[ppp.interferer_indices] <= window / 2]
    return _Trial(r, signal, float(powers.sum()), float(near.sum()))


def _capped_log1p(signal: float, interference: float) -> tuple[float, bool]:
    """log(1 + SIR) with SIR clipped to SIR_CAP."""
    if interference <= 0 or signal > SIR_CAP * interference:
        return math.log1p(SIR_CAP), True
    return math.log1p(signal / interference), False


type _TrialFn = Callable[
    [NetworkParams, ResourceAllocation, float, np.random.Generator, float], _Trial
]


def _rate_block(
    trial_fn: _TrialFn,
    stream: _Stream,
    params: NetworkParams,
    alloc: ResourceAllocation,
    mc: McConfig,
    signal_shape: float,
    record: bool,
    block: int,
    size: int,
) -> _Partial:
    rng = mc.rng(stream, block)
    window = mc.window_radius(params.lambda_b)
    partial = _Partial()

    for offset in range(size):
        trial = _draw(lambda: trial_fn(params, alloc, window, rng, signal_shape), partial)
        rate, capped = _capped_log1p(trial.signal, trial.interference)
        half_window, _ = _capped_log1p(trial.signal, trial.half_window_interference)
        partial.capped += capped
        partial.add(rate, half_window)
        if record:
            sir = math.expm1(rate)
            partial.rows.append((block * mc.block_size + offset, trial.serving_distance, sir, rate))

    return partial


def _require_feasible(params: NetworkParams, alloc: ResourceAllocation) -> None:
    violations = validate(params, alloc)
    if violations:
        names = ", ".join(violation.constraint for violation in violations)
        raise DomainError(f"allocation {alloc.as_tuple()} is infeasible ({names})")


def _write_samples(path: Path, partial: _Partial, mc: McConfig, target: str) -> None:
    meta = {"target": target, "seed": mc.seed, "trials": mc.trials}
    write_csv(path, SAMPLE_HEADER, partial.rows, meta)


def mc_comm_rate(
    params: NetworkParams,
    alloc: ResourceAllocation,
    mc: McConfig,
    *,
    workers: int = 1,
    signal_shape: float | None = None,
    samples_path: Path | None = None,
) -> McEstimate:
    """Estimate E[log(1 + SIR)] of the typical user in nats.

    `signal_shape` overrides the Gamma(d, 1) shape of the desired-signal gain.
    """
    _require_feasible(params, alloc)
    if alloc.k < 1:
        if samples_path is not None:
            _write_samples(samples_path, _Partial(), mc, "comm")
        return McEstimate.idle(mc)

    shape = float(alloc.residual_dof(params.m_t)) if signal_shape is None else signal_shape
    task = functools.partial(
        _rate_block, _comm_trial, _Stream.COMM, params, alloc, mc, shape, samples_path is not None
    )
    partial = _reduce_blocks(task, mc, workers)
    if samples_path is not None:
        _write_samples(samples_path, partial, mc, "comm")
    return partial.estimate(mc)


def mc_radar_rate(
    params: NetworkParams,
    alloc: ResourceAllocation,
    mc: McConfig,
    *,
    workers: int = 1,
    samples_path: Path | None = None,
) -> McEstimate:
    """Estimate the radar information rate of the typical target in nats."""
    _require_feasible(params, alloc)
    if alloc.k < 1 or alloc.j < 1:
        if samples_path is not None:
            _write_samples(samples_path, _Partial(), mc, "sense")
        return McEstimate.idle(mc)

    task = functools.partial(
        _rate_block,
        _sense_trial,
        _Stream.SENSE,
        params,
        alloc,
        mc,
        float(alloc.k),
        samples_path is not None,
    )
    partial = _reduce_blocks(task, mc, workers)
    if samples_path is not None:
        _write_samples(samples_path, partial, mc, "sense")
    return partial.estimate(mc)


def _laplace_block(
    z: float,
    serving_distance: float,
    params: NetworkParams,
    alloc: ResourceAllocation,
    mc: McConfig,
    block: int,
    size: int,
) -> _Partial:
    rng = mc.rng(_Stream.LAPLACE, block)
    window = mc.window_radius(params.lambda_b)
    scale = z * serving_distance ** (2 * params.beta)
    partial = _Partial()

    for _ in range(size):
        ppp = sample_ppp_conditioned(params.lambda_b, window, serving_distance, rng, alloc.q)
        links = ppp.distances_to_serving()[ppp.interferer_indices]
        powers = rng.gamma(alloc.k, size=links.size) * links**-params.alpha
        near = ppp.radii[ppp.interferer_indices] <= window / 2
        partial.add(math.exp(-scale * powers.sum()), math.exp(-scale * powers[near].sum()))

    return partial


def mc_sense_laplace(
    z: float,
    serving_distance: float,
    params: NetworkParams,
    alloc: ResourceAllocation,
    mc: McConfig,
    *,
    workers: int = 1,
) -> McEstimate:
    """Estimate E[exp(-z I_S) | R] with I_S normalised by the echo pathloss R^(-2 beta)."""
    if z < 0:
        raise DomainError(f"Laplace argument must be nonnegative, got {z}")
    if alloc.k < 1:
        raise DomainError("sensing interference needs K >= 1")

    task = functools.partial(_laplace_block, z, serving_distance, params, alloc, mc)
    return _reduce_blocks(task, mc, workers).estimate(mc)


def _eta_block(
    lambda_b: float, cluster_size: int, mc: McConfig, block: int, size: int
) -> FloatArray:
    rng = mc.rng(_Stream.ETA, block)
    window = mc.window_radius(lambda_b)
    scratch = _Partial()
    samples = np.empty(size)

    for offset in range(size):
        while True:
            ppp = _draw(
                lambda: sample_ppp(lambda_b, window, rng, ClusterMode.COMM, cluster_size), scratch
            )
            if ppp.cluster_indices.size == cluster_size:
                break
        radii = ppp.radii[ppp.cluster_indices]
        samples[offset] = radii[0] / radii[-1]

    return samples


def mc_eta_samples(
    lambda_b: float, cluster_size: int, mc: McConfig, *, workers: int = 1
) -> FloatArray:
    """Samples of r_1 / r_L, the serving over the L-th nearest BS distance."""
    if cluster_size < 2:
        raise DomainError(f"distance ratio needs a cluster of at least 2, got {cluster_size}")
    task = functools.partial(_eta_block, lambda_b, cluster_size, mc)
    return np.concatenate(_map_blocks(task, mc, workers))


def _nearest_block(lambda_b: float, mc: McConfig, block: int, size: int) -> FloatArray:
    rng = mc.rng(_Stream.NEAREST, block)
    window = mc.window_radius(lambda_b)
    scratch = _Partial()
    samples = np.empty(size)

    for offset in range(size):
        ppp = _draw(lambda: sample_ppp(lambda_b, window, rng), scratch)
        samples[offset] = ppp.serving_distance

    return samples


def mc_nearest_distance_samples(lambda_b: float, mc: McConfig, *, workers: int = 1) -> FloatArray:
    return np.concatenate(_map_blocks(functools.partial(_nearest_block, lambda_b, mc), mc, workers))


def _rq_ratio_block(lambda_b: float, q: int, mc: McConfig, block: int, size: int) -> FloatArray:
    rng = mc.rng(_Stream.RQ_RATIO, block)
    window = mc.window_radius(lambda_b)
    scratch = _Partial()
    samples = np.empty(size)

    for offset in range(size):
        ppp = _draw(lambda: sample_ppp(lambda_b, window, rng, ClusterMode.SENSE, q), scratch)
        furthest = ppp.cluster_indices[-1]
        r_q = ppp.distances_to_serving()[furthest]
        samples[offset] = r_q / (2 * ppp.serving_distance)

    return samples


def mc_rq_ratio_samples(
    params: NetworkParams, q: int, mc: McConfig, *, workers: int = 1
) -> FloatArray:
    """Empirical r_Q / 2R, with r_Q the distance from the serving BS to its (Q-1)-th neighbour."""
    if q < 2:
        raise DomainError(f"r_Q is defined for Q >= 2, got {q}")
    task = functools.partial(_rq_ratio_block, params.lambda_b, q, mc)
    return np.concatenate(_map_blocks(task, mc, workers))


@dataclass(frozen=True)
class GammaFit:
    shape: float
    scale: float
    ks_statistic: float
    p_value: float

    @classmethod
    def test(cls, samples: FloatArray, shape: float, scale: float = 1.0) -> "GammaFit":
        result = stats.kstest(samples, "gamma", args=(shape, 0.0, scale))
        return cls(shape, scale, float(result.statistic), float(result.pvalue))


@dataclass(frozen=True, eq=False)
class ChannelGainReport:
    """Empirical effective gains under explicit ZF precoding.

    The sensing interference gain is compared with a Gamma(K, scale) law whose scale is fitted
    from the sample mean; the equivalent BS-to-BS channel has per-entry variance M_r.
    """

    signal: FloatArray
    target: FloatArray
    comm_interference: FloatArray
    sense_interference: FloatArray
    signal_fit: GammaFit
    target_fit: GammaFit
    comm_interference_fit: GammaFit
    sense_interference_fit: GammaFit
    max_null_leakage: float
    rank_resamples: int


def _complex_normal(rng: np.random.Generator, *shape: int) -> ComplexArray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def _steering(antennas: int, rng: np.random.Generator) -> ComplexArray:
    angle = rng.uniform(0.0, math.pi)
    return np.exp(-1j * math.pi * np.arange(antennas) * math.cos(angle))


def _zf_precoder(
    channel: ComplexArray, constraints: ComplexArray
) -> tuple[ComplexArray, float, float]:
    """Unit precoder for `channel` orthogonal to every column of `constraints`.

    Returns the precoder, its gain |h^H f|^2 and the largest relative leakage |c^H f|^2 / |c|^2.
    """
    projected = channel
    if constraints.shape[1]:
        basis, triangle = np.linalg.qr(constraints)
        pivots = np.abs(np.diag(triangle))
        if pivots.min() <= _RANK_TOLERANCE * pivots.max():
            raise RankDeficiency(f"ZF constraint matrix of width {constraints.shape[1]} lost rank")
        projected = channel - basis @ (basis.conj().T @ channel)

    norm = float(np.linalg.norm(projected))
    precoder = projected / norm
    leakage = 0.0
    if constraints.shape[1]:
        hits = np.abs(constraints.conj().T @ precoder) ** 2
        leakage = float(np.max(hits / np.sum(np.abs(constraints) ** 2, axis=0)))
    return precoder, norm * norm, leakage


def _bs_precoders(rng: np.random.Generator, m_t: int, k: int) -> ComplexArray:
    """Precoders of an interfering BS serving K users of its own (columns)."""
    users = _complex_normal(rng, m_t, k)
    columns = [_zf_precoder(users[:, i], np.delete(users, i, axis=1))[0] for i in range(k)]
    return np.column_stack(columns)


def _channel_sample(
    params: NetworkParams, alloc: ResourceAllocation, rng: np.random.Generator
) -> tuple[float, float, float, float, float]:
    m_t, m_r = params.m_t, params.m_r
    k, l, j, q = alloc.as_tuple()

    own = _complex_normal(rng, m_t, k)
    cluster_users = _complex_normal(rng, m_t, k * (l - 1))
    sensing = [
        _complex_normal(rng, m_r, m_t).conj().T @ _steering(m_r, rng)
        for _ in range((q - 1) * j)
    ]
    shared = np.column_stack([cluster_users, *sensing]) if sensing else cluster_users

    precoders: list[ComplexArray] = []
    signal, leakage = 0.0, 0.0
    for user in range(k):
        constraints = np.column_stack([np.delete(own, user, axis=1), shared])
        precoder, gain, leak = _zf_precoder(own[:, user], constraints)
        precoders.append(precoder)
        leakage = max(leakage, leak)
        if user == 0:
            signal = gain

    steering = _steering(m_t, rng)
    target = float(sum(abs(np.vdot(steering, f)) ** 2 for f in precoders))

    interferer = _bs_precoders(rng, m_t, k)
    victim = _complex_normal(rng, m_t)
    comm_interference = float(np.sum(np.abs(victim.conj() @ interferer) ** 2))
    link = _steering(m_r, rng).conj() @ _complex_normal(rng, m_r, m_t)
    sense_interference = float(np.sum(np.abs(link @ interferer) ** 2))

    return signal, target, comm_interference, sense_interference, leakage


def _channel_block(
    params: NetworkParams, alloc: ResourceAllocation, mc: McConfig, block: int, size: int
) -> tuple[FloatArray, int]:
    rng = mc.rng(_Stream.CHANNEL, block)
    rows = np.empty((size, 5))
    resamples = 0

    for offset in range(size):
        while True:
            try:
                rows[offset] = _channel_sample(params, alloc, rng)
                break
            except RankDeficiency:
                resamples += 1

    return rows, resamples


def mc_channel_level_gains(
    params: NetworkParams, alloc: ResourceAllocation, mc: McConfig, *, workers: int = 1
) -> ChannelGainReport:
    """Draw `mc.trials` explicit channel sets and test the Gamma gain models."""
    nulled = alloc.k * alloc.l + alloc.nu - 1
    if params.m_t <= nulled:
        raise DomainError(f"no null space: M_t = {params.m_t} with {nulled} constraints")
    if alloc.k < 1:
        raise DomainError("the channel oracle needs at least one user (K >= 1)")

    blocks = _map_blocks(functools.partial(_channel_block, params, alloc, mc), mc, workers)
    rows = np.concatenate([block for block, _ in blocks])
    resamples = sum(count for _, count in blocks)
    if resamples:
        logger.warning("resampled %d rank-deficient constraint sets", resamples)

    signal, target, comm, sense = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    fitted_scale = float(np.mean(sense)) / alloc.k
    logger.info("sensing interference gain scale %.4g (M_r = %d)", fitted_scale, params.m_r)

    return ChannelGainReport(
        signal=signal,
        target=target,
        comm_interference=comm,
        sense_interference=sense,
        signal_fit=GammaFit.test(signal, params.m_t - nulled),
        target_fit=GammaFit.test(target, alloc.k),
        comm_interference_fit=GammaFit.test(comm, alloc.k),
        sense_interference_fit=GammaFit.test(sense, alloc.k, fitted_scale),
        max_null_leakage=float(np.max(rows[:, 4])),
        rank_resamples=resamples,
    )

