"""Special functions and quadrature kernels shared by the analytical evaluators.

All integrals go through QUADPACK (`scipy.integrate.quad`, adaptive Gauss-Kronrod with
interval bisection). Semi-infinite domains are split at `QuadratureSpec.split_point` and the
tail is compactified with u = split / z.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace

from scipy import integrate, special

from isacase.exceptions import DomainError, NonConvergence

logger = logging.getLogger(__name__)

type Integrand = Callable[[float], float]

_LAPLACE_CHECK_POINTS = (1e-12, 1e-9, 1e-6, 1e-3, 1.0)
_ROUNDOFF_SLACK = 10.0


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_refinements: int = 200
    split_point: float = 1.0
    sweep_rel_tol: float = 1e-4

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.sweep_rel_tol > 0:
            raise DomainError(f"sweep_rel_tol must be positive, got {self.sweep_rel_tol}")
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_refinements < 1:
            raise DomainError(f"max_refinements must be at least 1, got {self.max_refinements}")
        if not self.split_point > 0:
            raise DomainError(f"split_point must be positive, got {self.split_point}")

    def inner(self) -> "QuadratureSpec":
        """Spec for an integral nested inside one evaluated with `self`."""
        return replace(self, rel_tol=self.rel_tol / 10, abs_tol=self.abs_tol / 10)

    def for_sweep(self) -> "QuadratureSpec":
        """Spec for rates evaluated by the hundred in boundary and figure sweeps."""
        return replace(self, rel_tol=max(self.rel_tol, self.sweep_rel_tol))


def incomplete_beta(a: float, b: float, c: float) -> float:
    """B(a, b, c) = int_0^a t^(b-1) (1-t)^(c-1) dt.

    The limit comes first, as in the rate expressions that use it. Evaluated as the
    regularised `betainc` times the complete Beta function, which takes care of the
    integrable t^(b-1) singularity at 0 when 0 < b < 1.
    """
    if not b > 0 or not c > 0:
        raise DomainError(f"incomplete Beta diverges for exponents b={b}, c={c}")
    if not 0 <= a <= 1:
        raise DomainError(f"incomplete Beta limit must lie in [0, 1], got {a}")

    if a == 0:
        return 0.0
    return float(special.betainc(b, c, a) * special.beta(b, c))


def complete_beta(b: float, c: float) -> float:
    return incomplete_beta(1.0, b, c)


def one_minus_gamma_laplace(z: float, shape: float, scale: float = 1.0) -> float:
    """1 - (1 + scale z)^(-shape), accurate for small z."""
    return -math.expm1(-shape * math.log1p(scale * z))


def gamma_laplace(z: float, shape: float, scale: float = 1.0) -> float:
    """E[exp(-zX)] for X ~ Gamma(shape, scale)."""
    return math.exp(-shape * math.log1p(scale * z))


def _run_quad(f: Integrand, a: float, b: float, spec: QuadratureSpec) -> tuple[float, float]:
    result = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_refinements,
        full_output=1,
    )
    value, error = float(result[0]), float(result[1])
    if len(result) > 3:
        tolerance = max(spec.abs_tol, spec.rel_tol * abs(value))
        message = str(result[3]).splitlines()[0]
        if error > _ROUNDOFF_SLACK * tolerance:
            raise NonConvergence(value, error, f"quadrature on [{a}, {b}]: {message}")
        logger.debug("accepted quadrature on [%s, %s] within slack: %s", a, b, message)

    return value, error


def integrate_finite(f: Integrand, a: float, b: float, spec: QuadratureSpec) -> float:
    if b <= a:
        return 0.0

    value, _ = _run_quad(f, a, b, spec)
    return value


def integrate_semi_infinite(f: Integrand, spec: QuadratureSpec) -> float:
    """int_0^inf f(z) dz.

    `f` is never evaluated at 0 or infinity, so a removable point at 0 is harmless.
    """
    split = spec.split_point

    def tail(u: float) -> float:
        return f(split / u) * split / (u * u)

    head_value, head_error = _run_quad(f, 0.0, split, spec)
    tail_value, tail_error = _run_quad(tail, 0.0, 1.0, spec)

    value = head_value + tail_value
    error = head_error + tail_error
    if error > max(spec.abs_tol, spec.rel_tol * abs(value)) * _ROUNDOFF_SLACK * 2:
        raise NonConvergence(value, error, "semi-infinite quadrature")

    return value


def _check_laplace_map(name: str, laplace: Integrand, slack: float) -> None:
    """Reject maps outside [0, 1] or increasing in z, and maps that miss 1 as z -> 0.

    For heavy-tailed variables 1 - L(z) decays like z^delta with small delta; only its shrinking
    over six decades is required. `slack` absorbs quadrature noise in maps computed by
    integration.
    """
    values = [laplace(z) for z in _LAPLACE_CHECK_POINTS]
    for z, value in zip(_LAPLACE_CHECK_POINTS, values, strict=True):
        if not 0 <= value <= 1 + slack:
            raise DomainError(f"{name} is not a Laplace transform: value {value} at z = {z}")
    for z, (low, high) in zip(_LAPLACE_CHECK_POINTS[1:], zip(values, values[1:])):
        if high > low + slack:
            raise DomainError(f"{name} is not a Laplace transform: increases up to z = {z}")

    gap_tiny, gap_small = 1 - values[0], 1 - values[2]
    if gap_tiny > 0.5 * gap_small + slack:
        raise DomainError(f"{name} is not a Laplace transform: value {values[0]} near z = 0")


def hamdi_rate(
    laplace_signal: Integrand,
    laplace_interf: Integrand,
    spec: QuadratureSpec,
    signal_complement: Integrand | None = None,
    strict: bool = True,
) -> float:
    """E[log(1 + X / Y)] in nats for independent X, Y given their Laplace transforms.

    `signal_complement`, when given, must compute 1 - E[exp(-zX)] without cancellation; the
    integrand then stays accurate as z -> 0 where it tends to E[X] * 1. With `strict` off, maps
    that fail the Laplace-transform checks are integrated anyway and only logged.
    """
    slack = max(1e-9, _ROUNDOFF_SLACK * spec.rel_tol)
    for name, laplace in (("laplace_signal", laplace_signal), ("laplace_interf", laplace_interf)):
        try:
            _check_laplace_map(name, laplace, slack)
        except DomainError as error:
            if strict:
                raise
            logger.warning("integrating a non-Laplace map: %s", error.format_message())

    if signal_complement is None:

        def complement(z: float) -> float:
            return 1.0 - laplace_signal(z)
    else:
        complement = signal_complement

    def integrand(z: float) -> float:
        gap = complement(z)
        if gap == 0.0:
            return 0.0
        return gap / z * laplace_interf(z)

    return integrate_semi_infinite(integrand, spec)
