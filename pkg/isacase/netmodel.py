"""Network parameters, resource allocations and the feasibility rules shared by evaluators.

Lengths are in km and densities in points per km^2, so with the default lambda_b = 1 the
normalised and physical distances coincide.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from enum import StrEnum
from typing import Any


class FormulaVariant(StrEnum):
    AS_WRITTEN = "as_written"
    REDERIVED = "rederived"


@dataclass(frozen=True)
class NetworkParams:
    lambda_b: float = 1.0
    lambda_u: float | None = None
    lambda_s: float | None = None
    m_t: int = 20
    m_r: int = 10
    alpha: float = 4.0
    beta: float = 2.0
    xi: float = 0.1
    delta_t: float = 1.0
    p_t: float = 1.0
    j_max: int = 10

    @property
    def sensing_gain(self) -> float:
        """Deterministic echo scale xi * delta_t * M_r."""
        return self.xi * self.delta_t * self.m_r

    def with_(self, **changes: Any) -> NetworkParams:
        return replace(self, **changes)


@dataclass(frozen=True)
class ResourceAllocation:
    k: int
    l: int  # noqa: E741
    j: int
    q: int

    @property
    def nu(self) -> int:
        """Antennas spent nulling sensing interference, J(Q-1)."""
        return self.j * (self.q - 1)

    def residual_dof(self, m_t: int) -> int:
        return m_t - self.k * self.l - self.nu + 1

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.k, self.l, self.j, self.q)


@dataclass(frozen=True)
class PerfPoint:
    r_c: float
    r_s: float
    t_c: float
    t_s: float
    t_sum: float

    @classmethod
    def from_rates(
        cls, params: NetworkParams, alloc: ResourceAllocation, r_c: float, r_s: float
    ) -> PerfPoint:
        t_c = params.lambda_b * alloc.k * r_c
        t_s = params.lambda_b * alloc.j * r_s
        return cls(r_c=r_c, r_s=r_s, t_c=t_c, t_s=t_s, t_sum=t_c + t_s)

    def mix(self, other: PerfPoint, weight: float) -> PerfPoint:
        """weight * self + (1 - weight) * other, componentwise."""
        rest = 1.0 - weight
        t_c = weight * self.t_c + rest * other.t_c
        t_s = weight * self.t_s + rest * other.t_s
        return PerfPoint(
            r_c=weight * self.r_c + rest * other.r_c,
            r_s=weight * self.r_s + rest * other.r_s,
            t_c=t_c,
            t_s=t_s,
            t_sum=t_c + t_s,
        )


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str
    values: dict[str, float]

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _params_violations(params: NetworkParams) -> list[Violation]:
    checks: list[tuple[bool, str, str, dict[str, float]]] = [
        (params.lambda_b > 0, "lambda_b", "BS density must be positive", {}),
        (params.m_t >= 2, "m_t", "at least two transmit antennas are required", {}),
        (params.m_r >= 1, "m_r", "at least one receive antenna is required", {}),
        (params.alpha > 2, "alpha", "interference integral diverges unless alpha > 2", {}),
        (params.beta > 1, "beta", "sensing pathloss exponent must exceed 1", {}),
        (params.xi > 0, "xi", "radar cross-section must be positive", {}),
        (params.delta_t > 0, "delta_t", "matched-filter gain must be positive", {}),
        (params.p_t > 0, "p_t", "transmit power must be positive", {}),
        (params.j_max >= 1, "j_max", "at least one distinguishable target is required", {}),
    ]
    for name, density in (("lambda_u", params.lambda_u), ("lambda_s", params.lambda_s)):
        if density is not None:
            checks.append(
                (
                    density >= params.lambda_b,
                    name,
                    f"{name} must not be below lambda_b",
                    {name: density, "lambda_b": params.lambda_b},
                )
            )

    violations: list[Violation] = []
    for ok, constraint, message, values in checks:
        if not ok:
            values = values or {constraint: float(getattr(params, constraint))}
            violations.append(Violation(constraint, message, values))
    return violations


def _allocation_violations(
    params: NetworkParams, alloc: ResourceAllocation
) -> list[Violation]:
    k, l, j, q = alloc.as_tuple()
    violations: list[Violation] = []

    if k < 0 or j < 0:
        violations.append(
            Violation(
                "nonnegative", "user and target counts must be nonnegative", {"k": k, "j": j}
            )
        )
    if l < 1 or q < 1:
        violations.append(
            Violation("cluster_size", "cluster sizes must be at least 1", {"l": l, "q": q})
        )
    if (k == 0 and l != 1) or (j == 0 and q != 1):
        violations.append(
            Violation(
                "canonical",
                "an idle service must use a cluster of size 1",
                {"k": k, "l": l, "j": j, "q": q},
            )
        )
    if j > params.j_max:
        violations.append(
            Violation(
                "j_max",
                "more targets than can be distinguished",
                {"j": j, "j_max": params.j_max},
            )
        )

    used = k * l + alloc.nu + 1
    if used > params.m_t:
        violations.append(
            Violation(
                "dof",
                "KL + J(Q-1) + 1 exceeds the transmit antennas",
                {"used": used, "m_t": params.m_t, "residual_dof": alloc.residual_dof(params.m_t)},
            )
        )
    return violations


def validate(params: NetworkParams, alloc: ResourceAllocation) -> tuple[Violation, ...]:
    """Every violated invariant; an empty tuple means the pair is feasible."""
    return tuple(_params_violations(params) + _allocation_violations(params, alloc))


def is_feasible(params: NetworkParams, alloc: ResourceAllocation) -> bool:
    return not validate(params, alloc)


def params_violations(params: NetworkParams) -> tuple[Violation, ...]:
    return tuple(_params_violations(params))


def enumerate_feasible(params: NetworkParams) -> list[ResourceAllocation]:
    """All canonical feasible allocations in lexicographic (k, l, j, q) order."""
    budget = params.m_t - 1
    allocations: list[ResourceAllocation] = []

    for k in range(budget + 1):
        cluster_sizes = [1] if k == 0 else range(1, budget // k + 1)
        for l in cluster_sizes:  # noqa: E741
            left = budget - k * l
            for j in range(params.j_max + 1):
                sensing_sizes = [1] if j == 0 else range(1, left // j + 2)
                for q in sensing_sizes:
                    allocations.append(ResourceAllocation(k, l, j, q))

    return allocations
