import pytest

from dagsched.errors import IncompatiblePairError
from dagsched.model import (CompatTable, Instance, Pool, Schedule, Task, action_set, actual_time,
                            check_schedule, makespan, single_pool_instance, validate_instance)
from dagsched.p0 import P0, P0_LIST_SCHEDULE, P0_OPTIMAL_SCHEDULE

from oracles import sweep_feasible


def one_task(time=1.0, k=1.0, demand=(1.0,), cap=(3.0,)):
    return Instance([Task(1, time, demand)], [Pool(1, cap)], (), CompatTable.uniform(k))


def test_fixture_matches_constant(p0):
    assert p0.tasks == P0.tasks and p0.pools == P0.pools and p0.edges == P0.edges
    assert p0.actions == P0.actions


def test_validate_p0_clean(p0):
    assert validate_instance(p0) == []


def test_validate_two_cycle():
    inst = single_pool_instance({1: 1, 2: 1}, None, (1,), [(1, 2), (2, 1)])
    assert any("cycle in E" in r for r in validate_instance(inst))


def test_validate_empty_action_set():
    inst = one_task(demand=(5.0,), cap=(3.0,))
    assert any("empty action set" in r for r in validate_instance(inst))


def test_validate_dangling_and_negative():
    inst = Instance([Task(1, 1.0, (-1.0,))], [Pool(1, (3.0,))], [(1, 9)])
    report = validate_instance(inst)
    assert any("dangling edge" in r for r in report)
    assert any("negative demand" in r for r in report)


def test_compat_override_wins():
    table = CompatTable({(0, 0): 1.0}, {(1, 1): 0.5})
    inst = Instance([Task(1, 1.0, (1.0,)), Task(2, 1.0, (1.0,))], [Pool(1, (2.0,))], (), table)
    assert inst.coefficient(1, 1) == 0.5
    assert inst.coefficient(2, 1) == 1.0


@pytest.mark.parametrize("t,k,expected", [(1.0, 1.0, 1.0), (1.0, 0.8, 1.25)])
def test_actual_time(t, k, expected):
    assert actual_time(one_task(t, k), 1, 1) == expected


def test_actual_time_incompatible():
    with pytest.raises(IncompatiblePairError):
        actual_time(one_task(2.0, 0.0), 1, 1)


def test_action_set_p0():
    assert action_set(P0) == {(v, 1) for v in range(1, 9)}


def test_action_set_filters():
    assert action_set(one_task(demand=(4.0,), cap=(3.0,))) == frozenset()
    assert action_set(one_task(k=0.0)) == frozenset()


@pytest.mark.parametrize("x", [P0_LIST_SCHEDULE, P0_OPTIMAL_SCHEDULE])
def test_p0_schedules_feasible(x):
    assert check_schedule(P0, x).feasible
    assert sweep_feasible(P0, x)


def test_capacity_overflow_detected():
    start = dict(P0_LIST_SCHEDULE.start)
    start[4] = 0.0
    verdict = check_schedule(P0, Schedule(start, P0_LIST_SCHEDULE.pool))
    assert not verdict
    assert any(v.startswith("resource") for v in verdict.violations)


def test_p0_makespans():
    assert makespan(P0, P0_LIST_SCHEDULE) == 4.0
    assert abs(makespan(P0, P0_OPTIMAL_SCHEDULE) - 3.2) < 1e-12
    assert makespan(one_task(5.0), Schedule({1: 0.0}, {1: 1})) == 5.0


def test_half_open_release():
    # task 6 starts exactly when task 1 ends in the list schedule
    assert P0_LIST_SCHEDULE.start[6] == P0_LIST_SCHEDULE.end(P0, 1)


def test_makespan_invariant_to_storage_order():
    shuffled = Instance(tuple(reversed(P0.tasks)), P0.pools, tuple(reversed(P0.edges)), P0.compat)
    assert makespan(shuffled, P0_OPTIMAL_SCHEDULE) == makespan(P0, P0_OPTIMAL_SCHEDULE)


def test_precedence_violation():
    inst = single_pool_instance({1: 1, 2: 1}, None, (2,), [(1, 2)])
    verdict = check_schedule(inst, Schedule({1: 0.0, 2: 0.5}, {1: 1, 2: 1}))
    assert verdict.violations == ["precedence: (1,2)"]


def test_compat_violation():
    inst = Instance([Task(1, 1.0, (1.0,))], [Pool(1, (1.0,)), Pool(2, (1.0,))], (),
                    CompatTable({}, {(1, 1): 1.0, (1, 2): 0.0}))
    assert not check_schedule(inst, Schedule({1: 0.0}, {1: 2}))


def test_schedule_equality_ignores_sequence():
    a = Schedule({1: 0.0, 2: 0.0}, {1: 1, 2: 1}, [1, 2])
    b = Schedule({1: 0.0, 2: 0.0}, {1: 1, 2: 1}, [2, 1])
    assert a == b and hash(a) == hash(b)
