"""Analytical communication rate and ASE of the typical user under coordinated ZF nulling.

The user is served by its nearest BS; the L nearest BSs null towards it, so interference starts
at the L-th nearest distance r_L. With eta = r / r_L the conditional interference Laplace
transform is exp(-pi lambda_b r^2 H(z, K, alpha, eta)).
"""

import functools
import math
from dataclasses import dataclass

from isacase.exceptions import DomainError
from isacase.mathkern import (
    QuadratureSpec,
    gamma_laplace,
    hamdi_rate,
    incomplete_beta,
    integrate_finite,
    one_minus_gamma_laplace,
)
from isacase.netmodel import FormulaVariant, NetworkParams, ResourceAllocation


@dataclass(frozen=True)
class CommIntegrandCtx:
    d: int
    k: int
    l: int  # noqa: E741
    alpha: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DomainError(f"residual DoF must be at least 2, got {self.d}")

    @classmethod
    def build(cls, params: NetworkParams, alloc: ResourceAllocation) -> "CommIntegrandCtx":
        return cls(d=alloc.residual_dof(params.m_t), k=alloc.k, l=alloc.l, alpha=params.alpha)


def h_function(z: float, k: int, alpha: float, eta: float) -> float:
    """H(z, K, alpha, eta) = int_{eta^-2}^inf (1 - (1 + z u^(-alpha/2))^(-K)) du."""
    if not 0 < eta <= 1:
        raise DomainError(f"distance ratio must lie in (0, 1], got {eta}")
    if z == 0:
        return 0.0

    scaled = z * eta**alpha
    limit = scaled / (scaled + 1)
    shell = k * z ** (2 / alpha) * incomplete_beta(limit, 1 - 2 / alpha, k + 2 / alpha)
    edge = math.expm1(-k * math.log1p(scaled)) / eta**2
    return max(shell + edge, 0.0)


def eta_pdf(x: float, l: int) -> float:  # noqa: E741
    """Density of r_1 / r_L for the L nearest points of a planar PPP."""
    if l < 2:
        raise DomainError(f"distance ratio density needs a cluster of at least 2, got {l}")
    if not 0 <= x <= 1:
        return 0.0
    return 2 * (l - 1) * x * (1 - x * x) ** (l - 2)


def _interference_laplace(
    z: float, ctx: CommIntegrandCtx, spec: QuadratureSpec, variant: FormulaVariant
) -> float:
    if ctx.l == 1:
        return 1 / (h_function(z, ctx.k, ctx.alpha, 1.0) + 1)

    match variant:
        case FormulaVariant.AS_WRITTEN:

            def integrand(eta: float) -> float:
                return eta_pdf(eta, ctx.l) / (h_function(z, ctx.k, ctx.alpha, eta) + 1)

        case FormulaVariant.REDERIVED:
            # pi lambda r_L^2 ~ Gamma(L, 1) is independent of eta^2 ~ Beta(1, L - 1)
            def integrand(eta: float) -> float:
                h = h_function(z, ctx.k, ctx.alpha, eta)
                return eta_pdf(eta, ctx.l) * (1 + eta * eta * h) ** -ctx.l

    return integrate_finite(integrand, 0.0, 1.0, spec)


@functools.lru_cache(maxsize=4096)
def _comm_rate(ctx: CommIntegrandCtx, spec: QuadratureSpec, variant: FormulaVariant) -> float:
    inner = spec.inner()

    def signal(z: float) -> float:
        return gamma_laplace(z, ctx.d)

    def complement(z: float) -> float:
        return one_minus_gamma_laplace(z, ctx.d)

    def interference(z: float) -> float:
        return _interference_laplace(z, ctx, inner, variant)

    return hamdi_rate(signal, interference, spec, signal_complement=complement)


def avg_comm_rate(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    """R_c in nats per channel use; lambda_b never reaches the evaluator."""
    if alloc.k == 0:
        return 0.0

    return _comm_rate(CommIntegrandCtx.build(params, alloc), spec, variant)


def comm_ase(
    params: NetworkParams,
    alloc: ResourceAllocation,
    spec: QuadratureSpec,
    variant: FormulaVariant = FormulaVariant.REDERIVED,
) -> float:
    return params.lambda_b * alloc.k * avg_comm_rate(params, alloc, spec, variant)
