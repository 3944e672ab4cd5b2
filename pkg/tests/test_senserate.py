import math

import numpy as np
import pytest
from scipy import integrate, special

from isacase.exceptions import DomainError
from isacase.mathkern import QuadratureSpec
from isacase.mcsim import McConfig, mc_radar_rate, mc_sense_laplace
from isacase.netmodel import FormulaVariant, NetworkParams, ResourceAllocation
from isacase.senserate import (
    avg_radar_rate,
    avg_radar_rate_q1,
    avg_radar_rate_qge2,
    hole_arc_angle,
    hole_fraction,
    laplace_sense_interf_no_hole,
    laplace_sense_interf_q1,
    neighbour_distance_pdf,
    radar_rate_alpha2beta,
    rq_over_2R_ccdf,
    rq_pdf,
    sense_ase,
    sense_ase_alpha2beta,
    sense_ase_qge2,
    signal_laplace,
)

SPEC = QuadratureSpec()
PARAMS = NetworkParams()
SINGLE = ResourceAllocation(1, 1, 1, 1)


class TestGeometry:
    def test_signal_laplace(self) -> None:
        assert signal_laplace(0.0, 2, 0.1, 1.0, 10) == 1.0
        assert signal_laplace(1.0, 1, 0.1, 1.0, 10) == pytest.approx(0.5)
        assert signal_laplace(1.0, 3, 0.1, 1.0, 10) == pytest.approx(0.125)

    def test_hole_arc_angle(self) -> None:
        assert hole_arc_angle(0.0, 1.0) == pytest.approx(math.pi / 2)
        assert hole_arc_angle(1.0, 1.0) == pytest.approx(math.pi / 3)
        assert hole_arc_angle(2.0, 1.0) == 0.0
        assert hole_arc_angle(3.0, 1.0) == 0.0

    def test_hole_arc_domain(self) -> None:
        with pytest.raises(DomainError):
            hole_arc_angle(-1.0, 1.0)

    def test_hole_area(self) -> None:
        # the arcs inside the hole sweep exactly its area pi R^2
        r = 0.7
        area, _ = integrate.quad(lambda x: 2 * hole_arc_angle(x, r) * x, 0.0, 2 * r)
        assert area == pytest.approx(math.pi * r * r, rel=1e-8)


class TestSensingLaplace:
    def test_zero_argument(self) -> None:
        assert laplace_sense_interf_q1(0.0, 0.5, PARAMS, SINGLE, SPEC) == 1.0

    def test_decreasing(self) -> None:
        values = [laplace_sense_interf_q1(z, 0.5, PARAMS, SINGLE, SPEC) for z in (0.1, 1, 10, 100)]
        assert all(0 < value <= 1 for value in values)
        assert all(high > low for high, low in zip(values, values[1:]))

    def test_hole_reduces_interference(self) -> None:
        for z in (0.5, 5.0):
            with_hole = laplace_sense_interf_q1(z, 0.8, PARAMS, SINGLE, SPEC)
            assert with_hole > laplace_sense_interf_no_hole(z, 0.8, PARAMS, SINGLE)

    def test_domain(self) -> None:
        with pytest.raises(DomainError):
            laplace_sense_interf_q1(1.0, 0.0, PARAMS, SINGLE, SPEC)

    def test_as_written_value(self) -> None:
        z, r, k = 0.5, 0.7, 1
        params = PARAMS.with_(beta=3.0)
        scale = r / math.pi
        shell = z ** (2 / 3) * scale ** (5 / 3) * special.beta(1 / 3, 5 / 3)
        s = z * scale**2.5
        strip, _ = integrate.quad(
            lambda t: 2 * math.acos(t / 2) * t * s / (t**3 + s), 0.0, 2.0, epsrel=1e-12
        )
        expected = math.exp(-r * (shell + 1 - strip / math.pi))

        alloc = ResourceAllocation(k, 1, 1, 1)
        value = laplace_sense_interf_q1(z, r, params, alloc, SPEC, FormulaVariant.AS_WRITTEN)
        assert value == pytest.approx(expected, rel=1e-6)

    def test_as_written_limit_at_zero(self) -> None:
        # the printed transform tends to exp(-R) rather than 1
        params = PARAMS.with_(beta=3.0)
        value = laplace_sense_interf_q1(1e-12, 0.7, params, SINGLE, SPEC, FormulaVariant.AS_WRITTEN)
        assert value == pytest.approx(math.exp(-0.7), rel=1e-4)

    @pytest.mark.slow
    def test_against_conditioned_sampling(self) -> None:
        mc = McConfig(trials=20_000, seed=5)
        estimate = mc_sense_laplace(1.0, 0.5, PARAMS, SINGLE, mc)

        analytic = laplace_sense_interf_q1(1.0, 0.5, PARAMS, SINGLE, SPEC)
        assert abs(analytic - estimate.mean) < 1.6 * estimate.half_width + 1e-3


class TestSingleBsRate:
    def test_default_network(self) -> None:
        # interference with infinite mean; 1 - L(z) decays like sqrt(z) at alpha = 4
        rate = avg_radar_rate(NetworkParams(), SINGLE, SPEC)
        assert rate == avg_radar_rate_q1(NetworkParams(), SINGLE, SPEC)
        assert rate == pytest.approx(1.3416, rel=2e-3)

    def test_closed_form_matches_average(self) -> None:
        closed = radar_rate_alpha2beta(PARAMS, SINGLE, SPEC)
        assert avg_radar_rate_q1(PARAMS, SINGLE, SPEC) == pytest.approx(closed, rel=1e-4)

    def test_closed_form_needs_matching_exponents(self) -> None:
        with pytest.raises(DomainError):
            radar_rate_alpha2beta(PARAMS.with_(alpha=3.5), SINGLE, SPEC)

    def test_ase_linear_in_density(self) -> None:
        alloc = ResourceAllocation(2, 1, 3, 1)
        base = sense_ase_alpha2beta(PARAMS, alloc, SPEC)
        assert sense_ase_alpha2beta(PARAMS.with_(lambda_b=4.0), alloc, SPEC) == pytest.approx(
            4 * base, rel=1e-12
        )

    def test_idle(self) -> None:
        assert avg_radar_rate(PARAMS, ResourceAllocation(3, 1, 0, 1), SPEC) == 0.0
        assert sense_ase(PARAMS, ResourceAllocation(0, 1, 2, 1), SPEC) == 0.0

    def test_wrong_evaluator(self) -> None:
        with pytest.raises(DomainError):
            avg_radar_rate_q1(PARAMS, ResourceAllocation(1, 1, 1, 2), SPEC)
        with pytest.raises(DomainError):
            avg_radar_rate_qge2(PARAMS, SINGLE, SPEC)

    def test_as_written_diverges_at_beta_two(self) -> None:
        with pytest.raises(DomainError):
            avg_radar_rate_q1(PARAMS, SINGLE, SPEC, FormulaVariant.AS_WRITTEN)

    def test_as_written_closed_form(self) -> None:
        rate = radar_rate_alpha2beta(PARAMS, SINGLE, SPEC, FormulaVariant.AS_WRITTEN)
        assert math.isfinite(rate)
        assert rate > 0

    @pytest.mark.slow
    def test_as_written_finite_beyond_beta_two(self) -> None:
        params = PARAMS.with_(beta=3.0)
        rate = avg_radar_rate_q1(params, SINGLE, SPEC, FormulaVariant.AS_WRITTEN)
        assert math.isfinite(rate)
        assert rate > 0

    @pytest.mark.slow
    def test_against_monte_carlo(self) -> None:
        mc = McConfig(trials=20_000, seed=3)
        estimate = mc_radar_rate(PARAMS, SINGLE, mc)

        analytic = avg_radar_rate(PARAMS, SINGLE, SPEC)
        assert abs(analytic - estimate.mean) < 1.6 * estimate.half_width


class TestClusterDistances:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_neighbour_pdf_normalised(self, n: int) -> None:
        value, _ = integrate.quad(lambda r: neighbour_distance_pdf(r, n, 1.5), 0.0, np.inf)
        assert value == pytest.approx(1.0, rel=1e-8)

    def test_rq_pdf(self) -> None:
        value, _ = integrate.quad(lambda r: rq_pdf(r, 4, 1.0), 0.0, np.inf)
        assert value == pytest.approx(1.0, rel=1e-8)
        with pytest.raises(DomainError):
            rq_pdf(1.0, 1, 1.0)
        assert rq_pdf(0.8, 4, 1.0) == neighbour_distance_pdf(0.8, 4, 1.0)

    def test_ccdf(self) -> None:
        assert rq_over_2R_ccdf(0.7, 2) == 0.0
        assert rq_over_2R_ccdf(1.05, 50) >= 0.99
        values = [rq_over_2R_ccdf(x, 10) for x in (0.5, 0.8, 1.2, 3.0)]
        assert all(high >= low for high, low in zip(values, values[1:]))

    def test_ccdf_domain(self) -> None:
        with pytest.raises(DomainError):
            rq_over_2R_ccdf(0.3, 4)

    def test_hole_fraction(self) -> None:
        alloc = ResourceAllocation(1, 1, 1, 4)
        assert hole_fraction(1.0, 0.5, 1.2, PARAMS, alloc, SPEC) == 0.0
        share = hole_fraction(1.0, 1.0, 0.5, PARAMS, alloc, SPEC)
        assert 0 < share < 1


class TestClusterRate:
    def test_as_written_diverges_at_beta_two(self) -> None:
        with pytest.raises(DomainError):
            avg_radar_rate_qge2(
                PARAMS, ResourceAllocation(1, 1, 1, 2), SPEC, FormulaVariant.AS_WRITTEN
            )

    @pytest.mark.slow
    def test_larger_cluster_helps(self) -> None:
        spec = QuadratureSpec(rel_tol=1e-4)
        pair = avg_radar_rate_qge2(PARAMS, ResourceAllocation(1, 1, 1, 2), spec)
        triple = avg_radar_rate_qge2(PARAMS, ResourceAllocation(1, 1, 1, 3), spec)

        assert 0 < pair < triple
        ase = sense_ase_qge2(PARAMS, ResourceAllocation(1, 1, 3, 2), spec)
        assert ase == pytest.approx(3 * PARAMS.lambda_b * pair)

    @pytest.mark.slow
    def test_pair_against_monte_carlo(self) -> None:
        # the cluster evaluator ignores the hole, which costs up to ten percent at Q = 2
        alloc = ResourceAllocation(1, 1, 1, 2)
        estimate = mc_radar_rate(PARAMS, alloc, McConfig(trials=50_000, seed=11))

        analytic = avg_radar_rate_qge2(PARAMS, alloc, QuadratureSpec(rel_tol=1e-4))
        error = abs(analytic - estimate.mean) / estimate.mean
        assert error < 0.10 + 2 * estimate.half_width / estimate.mean
