"""Analytical radar information rate and sensing ASE of the typical target.

The target sits at the origin and is sensed by its nearest BS at distance R, so no other BS
lies in the disk O(0, R) (the interference hole). Interference reaches the serving BS over
BS-to-BS links with exponent alpha while the echo decays as R^(-2 beta).

Every evaluator has two variants:

* ``as_written`` evaluates the published expressions verbatim, exponent groupings included;
* ``rederived`` repeats the same derivation steps with the pathloss laws of the SIR definition
  and integrates numerically where the published form applies a closed-form reduction.
"""

import functools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from scipy import special

from isacase.commrate import h_function
from isacase.exceptions import DomainError
from isacase.mathkern import (
    QuadratureSpec,
    complete_beta,
    gamma_laplace,
    hamdi_rate,
    incomplete_beta,
    integrate_finite,
    integrate_semi_infinite,
    one_minus_gamma_laplace,
)
from isacase.netmodel import FormulaVariant, NetworkParams, ResourceAllocation

logger = logging.getLogger(__name__)

_LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class SenseIntegrandCtx:
    k: int
    q: int
    alpha: float
    beta: float
    xi: float
    delta_t: float
    m_r: int
    lambda_b: float

    @classmethod
    def build(cls, params: NetworkParams, alloc: ResourceAllocation) -> "SenseIntegrandCtx":
        return cls(
            k=alloc.k,
            q=alloc.q,
            alpha=params.alpha,
            beta=params.beta,
            xi=params.xi,
            delta_t=params.delta_t,
            m_r=params.m_r,
            lambda_b=params.lambda_b,
        )

    @property
    def gain(self) -> float:
        return self.xi * self.delta_t * self.m_r

    def serving_distance(self, v: float) -> float:
        """Distance R with pi lambda_b R^2 = v."""
        return math.sqrt(v / (math.pi * self.lambda_b))


def signal_laplace(z: float, k: int, xi: float, delta_t: float, m_r: int) -> float:
    """E[exp(-z xi delta_t M_r h)] for h ~ Gamma(K, 1)."""
    return gamma_laplace(z, k, xi * delta_t * m_r)


def hole_arc_angle(x: float, r: float) -> float:
    """Half-angle of the circle of radius x around the serving BS lying inside the hole."""
    if x < 0 or r <= 0:
        raise DomainError(f"hole geometry needs x >= 0 and R > 0, got x={x}, R={r}")
    if x >= 2 * r:
        return 0.0
    return math.acos(x / (2 * r))


def interference_gap(s: float, x: float, k: int, exponent: float) -> float:
    """1 - (1 + s x^(-exponent))^(-K), safe for x -> 0."""
    if s <= 0:
        return 0.0
    log_ratio = math.log(s) - exponent * math.log(x)
    if log_ratio > _LOG_OVERFLOW:
        return -math.expm1(-k * log_ratio)
    return -math.expm1(-k * math.log1p(math.exp(log_ratio)))


@functools.lru_cache(maxsize=65536)
def _strip_integral(s: float, k: int, exponent: float, spec: QuadratureSpec) -> float:
    """int_0^2 2 arccos(t/2) t (1 - (1 + s t^(-exponent))^(-K)) dt."""
    if s == 0:
        return 0.0

    def integrand(t: float) -> float:
        return 2 * math.acos(t / 2) * t * interference_gap(s, t, k, exponent)

    return integrate_finite(integrand, 0.0, 2.0, spec)


def _full_plane_term(s: float, k: int, alpha: float) -> float:
    """int_0^inf 2 pi x (1 - (1 + s x^(-alpha))^(-K)) dx."""
    return math.pi * k * s ** (2 / alpha) * complete_beta(1 - 2 / alpha, k + 2 / alpha)


def laplace_sense_interf_no_hole(
    z: float, r: float, params: NetworkParams, alloc: ResourceAllocation
) -> float:
    """Conditional Laplace transform if interferers could also occupy the hole."""
    s = z * r ** (2 * params.beta)
    return math.exp(-params.lambda_b * _full_plane_term(s, alloc.k, params.alpha))


def laplace_sense_interf_q1(
    z: float,
    r: float,
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """E[exp(-z I_S) | R = r] with the interference hole removed exactly (Q = 1)."""
    if z < 0 or r <= 0:
        raise DomainError(f"sensing Laplace transform needs z >= 0 and R > 0, got z={z}, R={r}")
    if z == 0:
        return 1.0

    k, alpha, beta, lam = alloc.k, params.alpha, params.beta, params.lambda_b
    match variant:
        case FormulaVariant.REDERIVED:
            full = _full_plane_term(z * r ** (2 * beta), k, alpha)
            hole = r * r * _strip_integral(z * r ** (2 * beta - alpha), k, alpha, spec)
            return math.exp(-lam * max(full - hole, 0.0))
        case FormulaVariant.AS_WRITTEN:
            scale = r / (math.pi * lam)
            shell = (
                k
                * z ** (2 / beta)
                * scale ** (2 * alpha / beta - 1)
                * incomplete_beta(1.0, 1 - 2 / beta, k + 2 / beta)
            )
            strip = _strip_integral(z * scale ** (alpha - beta / 2), k, beta, spec) / math.pi
            return math.exp(-r * (shell + 1 - strip))


def _check_sensing(alloc: ResourceAllocation, cluster: str) -> None:
    if cluster == "single" and alloc.q != 1:
        raise DomainError(f"the hole-corrected evaluator needs Q = 1, got Q = {alloc.q}")
    if cluster == "multi" and alloc.q < 2:
        raise DomainError(f"the cluster evaluator needs Q >= 2, got Q = {alloc.q}")
    if alloc.k < 1:
        raise DomainError("the sensing signal needs at least one stream (K >= 1)")


def _radar_rate(
    ctx: SenseIntegrandCtx,
    spec: QuadratureSpec,
    interference: Callable[[float], float],
    variant: FormulaVariant,
) -> float:
    def signal(z: float) -> float:
        return gamma_laplace(z, ctx.k, ctx.gain)

    def complement(z: float) -> float:
        return one_minus_gamma_laplace(z, ctx.k, ctx.gain)

    # printed transforms need not tend to 1 at z = 0
    strict = variant is FormulaVariant.REDERIVED
    return hamdi_rate(signal, interference, spec, signal_complement=complement, strict=strict)


@functools.lru_cache(maxsize=1024)
def _radar_rate_q1(
    params: NetworkParams, k: int, spec: QuadratureSpec, variant: FormulaVariant
) -> float:
    alloc = ResourceAllocation(k, 1, 1, 1)
    ctx = SenseIntegrandCtx.build(params, alloc)
    inner = spec.inner()

    def interference(z: float) -> float:
        match variant:
            case FormulaVariant.REDERIVED:
                # v = pi lambda_b R^2 is Exp(1) for the nearest BS
                def over_serving(v: float) -> float:
                    r = ctx.serving_distance(v)
                    return math.exp(-v) * laplace_sense_interf_q1(
                        z, r, params, alloc, inner, variant
                    )

            case FormulaVariant.AS_WRITTEN:

                def over_serving(v: float) -> float:
                    lam = ctx.lambda_b
                    density = 2 * math.pi * lam * v * math.exp(-math.pi * lam * v * v)
                    return density * laplace_sense_interf_q1(z, v, params, alloc, inner, variant)

        return integrate_semi_infinite(over_serving, inner)

    return _radar_rate(ctx, spec, interference, variant)


def avg_radar_rate_q1(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """R_s for Q = 1 in nats, averaging the hole-corrected transform over R."""
    if alloc.j == 0:
        return 0.0
    _check_sensing(alloc, "single")

    return _radar_rate_q1(params, alloc.k, spec, variant)


def _alpha2beta_denominator(
    z: float, k: int, alpha: float, spec: QuadratureSpec, variant: FormulaVariant
) -> float:
    match variant:
        case FormulaVariant.REDERIVED:
            shell = k * z ** (2 / alpha) * complete_beta(1 - 2 / alpha, k + 2 / alpha)
            strip = _strip_integral(z, k, alpha, spec)
        case FormulaVariant.AS_WRITTEN:
            shell = k * z ** (1 / alpha) * incomplete_beta(1.0, 1 - 1 / alpha, k + 1 / alpha)
            strip = _strip_integral(z, k, 2 * alpha, spec)
    return shell - strip / math.pi + 1


def radar_rate_alpha2beta(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """R_s for Q = 1 when alpha = 2 beta, where the average over R is exact in closed form."""
    if params.alpha != 2 * params.beta:
        raise DomainError(f"closed form needs alpha = 2 beta, got {params.alpha}, {params.beta}")
    if alloc.j == 0:
        return 0.0
    _check_sensing(alloc, "single")

    ctx = SenseIntegrandCtx.build(params, alloc)
    inner = spec.inner()

    def interference(z: float) -> float:
        if z == 0:
            return 1.0
        return 1 / _alpha2beta_denominator(z, ctx.k, ctx.alpha, inner, variant)

    return _radar_rate(ctx, spec, interference, variant)


def sense_ase_alpha2beta(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    return params.lambda_b * alloc.j * radar_rate_alpha2beta(params, alloc, spec, variant)


def neighbour_distance_pdf(r: float, n: int, lambda_b: float) -> float:
    """Density of the distance to the n-th nearest point of a PPP of intensity lambda_b."""
    if n < 1:
        raise DomainError(f"neighbour order must be at least 1, got {n}")
    if r <= 0:
        return 0.0

    v = lambda_b * math.pi * r * r
    log_density = -v + n * math.log(v) + math.log(2) - math.log(r) - float(special.gammaln(n))
    return math.exp(log_density)


def rq_pdf(r: float, q: int, lambda_b: float) -> float:
    """Published density of r_Q, which has the law of the Q-th nearest neighbour distance.

    r_Q is the distance from the serving BS to its (Q-1)-th nearest BS; the rederived cluster
    evaluator therefore uses `neighbour_distance_pdf` with order Q - 1 instead.
    """
    if q < 2:
        raise DomainError(f"r_Q is defined for Q >= 2, got {q}")
    return neighbour_distance_pdf(r, q, lambda_b)


def rq_over_2R_ccdf(x: float, q: int) -> float:
    """Published P[r_Q / 2R >= x], valid on x >= 1/2."""
    if q < 2:
        raise DomainError(f"r_Q is defined for Q >= 2, got {q}")
    if x < 0.5:
        raise DomainError(f"published CCDF branch needs x >= 1/2, got {x}")
    return 1 - (1 - 1 / (4 * x * x)) ** (q - 2)


def _cluster_conditional(
    z: float, r: float, r_q: float, ctx: SenseIntegrandCtx, variant: FormulaVariant
) -> float:
    k, alpha, beta = ctx.k, ctx.alpha, ctx.beta
    match variant:
        case FormulaVariant.REDERIVED:
            # PPP beyond r_Q around the serving BS, hole ignored
            s = z * r ** (2 * beta) * r_q**-alpha
            exponent = math.pi * ctx.lambda_b * r_q * r_q * h_function(s, k, alpha, 1.0)
        case FormulaVariant.AS_WRITTEN:
            w = z * r ** (2 * alpha) * r_q**-beta
            exponent = math.pi * ctx.lambda_b * (
                r_q * r_q * math.expm1(-k * math.log1p(w))
                + k
                * z ** (2 / beta)
                * r ** (4 * alpha / beta)
                * incomplete_beta(w / (w + 1), 1 - 2 / beta, k + 2 / beta)
            )
    return math.exp(-exponent)


@functools.lru_cache(maxsize=1024)
def _radar_rate_cluster(
    params: NetworkParams, k: int, q: int, spec: QuadratureSpec, variant: FormulaVariant
) -> float:
    ctx = SenseIntegrandCtx.build(params, ResourceAllocation(k, 1, 1, q))
    inner = spec.inner()
    order = q - 1 if variant is FormulaVariant.REDERIVED else q
    log_norm = float(special.gammaln(order))

    def interference(z: float) -> float:
        # v_q = pi lambda_b r_Q^2 ~ Gamma(order, 1), v = pi lambda_b R^2 ~ Exp(1), independent
        def over_cluster(v_q: float) -> float:
            r_q = ctx.serving_distance(v_q)
            weight = math.exp((order - 1) * math.log(v_q) - v_q - log_norm)

            def over_serving(v: float) -> float:
                return math.exp(-v) * _cluster_conditional(
                    z, ctx.serving_distance(v), r_q, ctx, variant
                )

            return weight * integrate_semi_infinite(over_serving, inner)

        return integrate_semi_infinite(over_cluster, inner)

    return _radar_rate(ctx, spec, interference, variant)


def avg_radar_rate_qge2(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """R_s for Q >= 2, averaging the hole-free conditional transform over (R, r_Q)."""
    if alloc.j == 0:
        return 0.0
    _check_sensing(alloc, "multi")

    return _radar_rate_cluster(params, alloc.k, alloc.q, spec, variant)


def sense_ase_qge2(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    return params.lambda_b * alloc.j * avg_radar_rate_qge2(params, alloc, spec, variant)


def avg_radar_rate(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """R_s routed to the hole-corrected (Q = 1) or cluster (Q >= 2) evaluator."""
    if alloc.j == 0 or alloc.k == 0:
        return 0.0
    if alloc.q == 1:
        return avg_radar_rate_q1(params, alloc, spec, variant)
    return avg_radar_rate_qge2(params, alloc, spec, variant)


def sense_ase(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    return params.lambda_b * alloc.j * avg_radar_rate(params, alloc, spec, variant)


def hole_fraction(
    z: float,
    r: float,
    r_q: float,
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
) -> float:
    """Share of the hole-strip term in -log E[exp(-z I_S) | R, r_Q].

    Interferers start at r_Q around the serving BS; the hole can only matter on [r_Q, 2R].
    """
    k, alpha = alloc.k, params.alpha
    s = z * r ** (2 * params.beta)
    total = math.pi * r_q * r_q * h_function(s * r_q**-alpha, k, alpha, 1.0)
    if total == 0 or r_q >= 2 * r:
        return 0.0

    def strip(x: float) -> float:
        return 2 * hole_arc_angle(x, r) * x * interference_gap(s, x, k, alpha)

    return integrate_finite(strip, r_q, 2 * r, spec) / total
