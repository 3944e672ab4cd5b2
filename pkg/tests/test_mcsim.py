import math
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np
import pytest
from scipy import stats

from isacase._csvio import read_csv
from isacase.exceptions import DomainError, EmptyRealization
from isacase.mcsim import (
    SAMPLE_HEADER,
    SIR_CAP,
    ClusterMode,
    GammaFit,
    McConfig,
    McEstimate,
    mc_channel_level_gains,
    mc_comm_rate,
    mc_eta_samples,
    mc_nearest_distance_samples,
    mc_radar_rate,
    mc_rq_ratio_samples,
    sample_ppp,
    sample_ppp_conditioned,
)
from isacase.netmodel import NetworkParams, ResourceAllocation

PARAMS = NetworkParams()
SMALL = McConfig(trials=1_000, seed=42, window_radius_factor=10.0, block_size=250)


class TestMcConfig:
    @pytest.mark.parametrize(
        "changes",
        [{"trials": 0}, {"window_radius_factor": 4.0}, {"ci_level": 1.0}, {"seed": -1}],
    )
    def test_invalid(self, changes: dict[str, Any]) -> None:
        with pytest.raises(DomainError):
            McConfig(**changes)

    def test_blocks_cover_trials(self) -> None:
        mc = McConfig(trials=1_100, block_size=500)
        assert mc.blocks() == [(0, 500), (1, 500), (2, 100)]

    def test_window(self) -> None:
        assert McConfig(window_radius_factor=20.0).window_radius(4.0) == pytest.approx(10.0)

    def test_streams_are_reproducible(self) -> None:
        first = SMALL.rng(1, 3).random(4)
        assert np.array_equal(first, SMALL.rng(1, 3).random(4))
        assert not np.array_equal(first, SMALL.rng(2, 3).random(4))


class TestSampling:
    def test_mean_count(self) -> None:
        rng = np.random.default_rng(1)
        counts = [sample_ppp(1.0, 20.0, rng).points.shape[0] for _ in range(1_000)]
        assert np.mean(counts) == pytest.approx(math.pi * 400, rel=0.01)

    def test_comm_partition(self) -> None:
        rng = np.random.default_rng(2)
        for _ in range(50):
            ppp = sample_ppp(1.0, 10.0, rng, ClusterMode.COMM, cluster_size=3)
            radii = ppp.radii

            assert ppp.cluster_indices[0] == ppp.serving_index
            assert radii[ppp.serving_index] == radii.min()
            assert np.all(np.diff(radii[ppp.cluster_indices]) >= 0)
            assert radii[ppp.interferer_indices].min() >= radii[ppp.cluster_indices].max()
            members = np.concatenate((ppp.cluster_indices, ppp.interferer_indices))
            assert np.array_equal(np.sort(members), np.arange(radii.size))

    def test_sense_partition(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(50):
            ppp = sample_ppp(1.0, 10.0, rng, ClusterMode.SENSE, cluster_size=4)
            links = ppp.distances_to_serving()

            assert ppp.cluster_indices[0] == ppp.serving_index
            assert ppp.cluster_indices.size == 4
            assert links[ppp.interferer_indices].min() >= links[ppp.cluster_indices].max()
            assert ppp.radii[ppp.interferer_indices].min() >= ppp.serving_distance

    def test_empty_window(self) -> None:
        with pytest.raises(EmptyRealization):
            sample_ppp(1e-12, 1.0, np.random.default_rng(0))

    def test_conditioned(self) -> None:
        ppp = sample_ppp_conditioned(1.0, 10.0, 0.8, np.random.default_rng(4))

        assert ppp.serving_distance == pytest.approx(0.8)
        assert ppp.radii[ppp.interferer_indices].min() >= 0.8
        with pytest.raises(DomainError):
            sample_ppp_conditioned(1.0, 10.0, 12.0, np.random.default_rng(4))


class TestEstimates:
    def test_interval(self) -> None:
        estimate = McEstimate(mean=2.0, half_width=0.1, trials=10, seed=1, half_window_mean=1.9)

        assert estimate.contains(2.05)
        assert not estimate.contains(2.2)
        assert estimate.truncation_shift == pytest.approx(0.05)

    def test_reproducible(self) -> None:
        alloc = ResourceAllocation(2, 1, 0, 1)
        assert mc_comm_rate(PARAMS, alloc, SMALL) == mc_comm_rate(PARAMS, alloc, SMALL)

    def test_independent_of_workers(self) -> None:
        alloc = ResourceAllocation(2, 2, 1, 2)
        serial = mc_radar_rate(PARAMS, alloc, SMALL)
        assert mc_radar_rate(PARAMS, alloc, SMALL, workers=2) == serial

    def test_seeds_agree_statistically(self) -> None:
        alloc = ResourceAllocation(4, 1, 0, 1)
        first = mc_comm_rate(PARAMS, alloc, SMALL)
        second = mc_comm_rate(PARAMS, alloc, replace(SMALL, seed=43))

        assert first.mean != second.mean
        assert abs(first.mean - second.mean) < first.half_width + second.half_width

    def test_signal_shape_override(self) -> None:
        alloc = ResourceAllocation(4, 1, 0, 1)
        weak = mc_comm_rate(PARAMS, alloc, SMALL, signal_shape=1.0)
        assert weak.mean < mc_comm_rate(PARAMS, alloc, SMALL).mean

    def test_infeasible(self) -> None:
        with pytest.raises(DomainError):
            mc_comm_rate(PARAMS, ResourceAllocation(10, 2, 0, 1), SMALL)
        with pytest.raises(DomainError):
            mc_radar_rate(PARAMS, ResourceAllocation(10, 2, 1, 1), SMALL)

    def test_idle_links(self, tmp_path: Path) -> None:
        sink = tmp_path / "sense.csv"
        sense = mc_radar_rate(PARAMS, ResourceAllocation(2, 1, 0, 1), SMALL, samples_path=sink)
        comm = mc_comm_rate(PARAMS, ResourceAllocation(0, 1, 2, 1), SMALL)

        assert sense == comm == McEstimate.idle(SMALL)
        assert sense.mean == sense.half_width == 0.0
        assert sense.truncation_shift is None
        assert read_csv(sink)[1] == []

    def test_capped_sir(self) -> None:
        # every BS in the window joins the sensing cluster, so nothing interferes
        params = PARAMS.with_(m_t=200)
        mc = McConfig(trials=50, seed=1, window_radius_factor=5.0)
        estimate = mc_radar_rate(params, ResourceAllocation(1, 1, 1, 150), mc)

        assert estimate.capped == 50
        assert estimate.mean == pytest.approx(math.log1p(SIR_CAP))

    def test_samples_sink(self, tmp_path: Path) -> None:
        path = tmp_path / "samples.csv"
        mc = McConfig(trials=300, seed=9, window_radius_factor=10.0, block_size=100)
        estimate = mc_comm_rate(PARAMS, ResourceAllocation(1, 1, 0, 1), mc, samples_path=path)

        meta, rows = read_csv(path)
        assert "seed=9" in meta
        assert list(rows[0]) == list(SAMPLE_HEADER)
        assert [int(row["trial"]) for row in rows] == list(range(300))
        rates = np.array([float(row["rate"]) for row in rows])
        assert rates.mean() == pytest.approx(estimate.mean, rel=1e-9)


class TestDistributions:
    def test_nearest_distance(self) -> None:
        mc = McConfig(trials=50_000, seed=8, window_radius_factor=5.0, block_size=10_000)
        samples = mc_nearest_distance_samples(2.0, mc)

        def cdf(r: float) -> float:
            return -math.expm1(-2.0 * math.pi * r * r)

        assert stats.kstest(samples, np.vectorize(cdf)).statistic < 0.01

    @pytest.mark.parametrize("cluster_size", [2, 3])
    def test_eta(self, cluster_size: int) -> None:
        mc = McConfig(trials=20_000, seed=6, window_radius_factor=5.0, block_size=5_000)
        samples = mc_eta_samples(1.0, cluster_size, mc)

        # eta^2 ~ Beta(1, L - 1)
        statistic = stats.kstest(samples**2, "beta", args=(1, cluster_size - 1)).statistic
        assert statistic < 0.02

    def test_eta_needs_cluster(self) -> None:
        with pytest.raises(DomainError):
            mc_eta_samples(1.0, 1, SMALL)

    def test_rq_ratio(self) -> None:
        mc = McConfig(trials=2_000, seed=10, window_radius_factor=10.0)
        samples = mc_rq_ratio_samples(PARAMS, 50, mc)

        assert np.all(samples > 0)
        assert np.mean(samples >= 1.05) >= 0.99


class TestChannelGains:
    def test_single_user(self) -> None:
        mc = McConfig(trials=2_000, seed=12, block_size=1_000)
        report = mc_channel_level_gains(PARAMS, ResourceAllocation(1, 1, 0, 1), mc)

        assert report.signal_fit.shape == PARAMS.m_t
        assert report.signal_fit.p_value > 1e-3
        assert report.rank_resamples == 0

    def test_target_gain_has_unit_scale(self) -> None:
        # unit-norm precoder against a steering vector with |a|^2 = M_t
        mc = McConfig(trials=2_000, seed=14, block_size=1_000)
        report = mc_channel_level_gains(PARAMS, ResourceAllocation(1, 1, 0, 1), mc)

        assert report.target.mean() == pytest.approx(1.0, abs=0.1)
        assert report.target_fit.scale == 1.0
        assert report.target_fit.p_value > 1e-3
        assert GammaFit.test(report.target, 1.0, PARAMS.m_t).p_value < 1e-3

    def test_nulling(self) -> None:
        mc = McConfig(trials=2_000, seed=13, block_size=1_000)
        alloc = ResourceAllocation(2, 2, 1, 2)
        report = mc_channel_level_gains(PARAMS, alloc, mc)

        assert report.signal_fit.shape == alloc.residual_dof(PARAMS.m_t)
        assert report.signal_fit.p_value > 1e-3
        assert report.max_null_leakage < 1e-20
        assert report.signal.size == 2_000

    def test_no_null_space(self) -> None:
        with pytest.raises(DomainError):
            mc_channel_level_gains(PARAMS.with_(m_t=4), ResourceAllocation(2, 3, 0, 1), SMALL)
