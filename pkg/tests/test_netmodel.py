import itertools

import pytest

from isacase.netmodel import (
    NetworkParams,
    PerfPoint,
    ResourceAllocation,
    enumerate_feasible,
    is_feasible,
    params_violations,
    validate,
)


def brute_force(params: NetworkParams) -> list[ResourceAllocation]:
    m = params.m_t
    grid = itertools.product(
        range(m + 1), range(1, m + 1), range(params.j_max + 1), range(1, m + 2)
    )
    candidates = (ResourceAllocation(*alloc) for alloc in grid)
    return [alloc for alloc in candidates if is_feasible(params, alloc)]


class TestValidate:
    def test_feasible(self) -> None:
        params = NetworkParams()
        assert validate(params, ResourceAllocation(12, 1, 7, 1)) == ()
        assert validate(params, ResourceAllocation(4, 2, 2, 6)) == ()

    def test_dof_budget(self) -> None:
        params = NetworkParams(m_t=20)
        assert is_feasible(params, ResourceAllocation(19, 1, 0, 1))
        violations = validate(params, ResourceAllocation(10, 2, 0, 1))

        assert [violation.constraint for violation in violations] == ["dof"]
        assert violations[0].values["used"] == 21
        assert violations[0].values["m_t"] == 20

    def test_nulling_counts(self) -> None:
        params = NetworkParams(m_t=10)
        assert is_feasible(params, ResourceAllocation(1, 1, 2, 5))
        assert not is_feasible(params, ResourceAllocation(1, 1, 2, 6))

    def test_j_max(self) -> None:
        violations = validate(NetworkParams(j_max=3), ResourceAllocation(1, 1, 4, 1))
        assert [violation.constraint for violation in violations] == ["j_max"]

    def test_canonical_idle(self) -> None:
        params = NetworkParams()
        for alloc in (ResourceAllocation(0, 2, 1, 1), ResourceAllocation(1, 1, 0, 3)):
            assert "canonical" in {v.constraint for v in validate(params, alloc)}

    def test_sizes(self) -> None:
        violations = validate(NetworkParams(), ResourceAllocation(-1, 0, 1, 1))
        constraints = {violation.constraint for violation in violations}
        assert {"nonnegative", "cluster_size"} <= constraints

    def test_params(self) -> None:
        params = NetworkParams(alpha=2.0, lambda_u=0.5)
        assert {violation.constraint for violation in params_violations(params)} == {
            "alpha",
            "lambda_u",
        }
        assert not is_feasible(params, ResourceAllocation(1, 1, 1, 1))

    def test_violation_json_shape(self) -> None:
        violation = validate(NetworkParams(m_t=4), ResourceAllocation(2, 2, 0, 1))[0]
        assert set(violation.as_dict()) == {"constraint", "message", "values"}


class TestEnumerate:
    @pytest.mark.parametrize(("m_t", "j_max"), [(2, 1), (3, 1), (5, 2), (8, 3), (10, 10)])
    def test_matches_brute_force(self, m_t: int, j_max: int) -> None:
        params = NetworkParams(m_t=m_t, j_max=j_max)
        assert enumerate_feasible(params) == sorted(brute_force(params), key=lambda a: a.as_tuple())

    def test_all_feasible_and_unique(self) -> None:
        params = NetworkParams()
        allocations = enumerate_feasible(params)

        assert all(is_feasible(params, alloc) for alloc in allocations)
        assert len(set(allocations)) == len(allocations)

    def test_small_budget(self) -> None:
        params = NetworkParams(m_t=3, j_max=1)
        allocations = {alloc.as_tuple() for alloc in enumerate_feasible(params)}
        assert {(0, 1, 0, 1), (1, 1, 1, 2), (2, 1, 0, 1), (1, 2, 0, 1), (0, 1, 1, 3)} <= allocations
        assert (2, 1, 1, 2) not in allocations


class TestAllocation:
    def test_nu_and_dof(self) -> None:
        alloc = ResourceAllocation(4, 2, 2, 6)
        assert alloc.nu == 10
        assert alloc.residual_dof(20) == 3


class TestPerfPoint:
    def test_from_rates(self) -> None:
        params = NetworkParams(lambda_b=2.0)
        perf = PerfPoint.from_rates(params, ResourceAllocation(3, 1, 2, 1), 1.5, 0.5)

        assert perf.t_c == pytest.approx(9.0)
        assert perf.t_s == pytest.approx(2.0)
        assert perf.t_sum == pytest.approx(11.0)

    def test_mix(self) -> None:
        first = PerfPoint(1.0, 0.0, 4.0, 0.0, 4.0)
        second = PerfPoint(0.0, 1.0, 0.0, 2.0, 2.0)
        mixed = first.mix(second, 0.25)

        assert mixed.t_c == pytest.approx(1.0)
        assert mixed.t_s == pytest.approx(1.5)
        assert mixed.t_sum == pytest.approx(2.5)
        assert first.mix(second, 1.0) == first
