import random

import pytest

from dagsched.errors import InfeasibleScheduleError, MalformedSolutionError, ModeMismatchError
from dagsched.genmaps import PolicyConfig, ScoreTable, rollout_skip_extended
from dagsched.milp import (MilpSolution, big_m_constants, export_milp, lp_stats, milp_to_schedule,
                           schedule_to_milp, verify_milp_solution)
from dagsched.model import CompatTable, Instance, Pool, Schedule, Task, check_schedule, single_pool_instance
from dagsched.p0 import P0, P0_LIST_SCHEDULE, P0_OPTIMAL_SCHEDULE
from dagsched.search import brute_force_optimum

from oracles import parse_lp, solve_lp_text

ONE = single_pool_instance({1: 2.0}, None, (1,))


def rollout_schedules(instances, per=3):
    for inst in instances:
        table = ScoreTable({a: 0.0 for a in inst.actions})
        for seed in range(per):
            yield inst, rollout_skip_extended(inst, table, PolicyConfig("sampling", seed))[0]


def test_p0_homogeneous_counts():
    stats = lp_stats(export_milp(P0, "hom"))
    assert stats["variables"] == 3 * 8 ** 2 + 8 + 1 == 201
    # makespan 8, precedence 5, six pair families 6*64, capacity 8
    assert stats["constraints"] == 8 + 5 + 6 * 64 + 8 == 405


def test_p0_heterogeneous_counts():
    stats = lp_stats(export_milp(P0, "het"))
    n = 8
    assert stats["binaries"] == 3 * n * n + n * n + n
    assert stats["constraints"] == n + 5 + 6 * n * n + 2 * n * n + n + n + n


def test_single_task_export():
    text = export_milp(ONE, "hom")
    assert " mk_1: s_1 - tmax <= -2.0" in text
    assert " s_1 >= 0" in text
    assert "Minimize\n obj: tmax\nSubject To" in text


def test_export_byte_stable():
    assert export_milp(P0, "hom") == export_milp(P0, "hom")
    assert export_milp(P0, "het", 1e-4) == export_milp(P0, "het", 1e-4)


def test_strict_rows_use_eps():
    text = export_milp(ONE, "hom", eps_strict=0.25)
    assert " u1_1_1: - 2.0 u_1_1 <= -0.25" in text
    rows, _, _ = parse_lp(text)
    assert any(abs(rhs + 0.25) < 1e-12 for _, _, rhs in rows)


def test_mode_mismatch():
    two = Instance([Task(1, 1.0, (1.0,))], [Pool(1, (1.0,)), Pool(2, (1.0,))], (), CompatTable.uniform())
    slow = Instance([Task(1, 1.0, (1.0,))], [Pool(1, (1.0,))], (), CompatTable.uniform(0.5))
    for inst in (two, slow):
        with pytest.raises(ModeMismatchError):
            export_milp(inst, "hom")
        assert export_milp(inst, "het")


def test_big_m_constants():
    assert big_m_constants(P0, "hom")["C1"] == pytest.approx(8.3)
    het = big_m_constants(P0, "het")
    assert het["C0"] == 2.0
    assert het["C1"] == pytest.approx(8.3 + 9.0)


# HiGHS accepts violations up to about 1e-6, so a strict margin of that size
# can be absorbed; the solver checks export with a wider one.
ORACLE_EPS = 1e-3


def test_scipy_solves_p0_to_optimum():
    for mode in ("hom", "het"):
        value, _ = solve_lp_text(export_milp(P0, mode, ORACLE_EPS))
        assert abs(value - 3.2) < 1e-6


def test_scipy_matches_oracle_het(small_instances):
    for inst in small_instances[:12]:
        value, sol = solve_lp_text(export_milp(inst, "het", ORACLE_EPS))
        _, opt = brute_force_optimum(inst)
        assert opt - 1e-6 <= value <= opt + inst.n * ORACLE_EPS


def test_p0_optimum_verifies():
    for mode in ("hom", "het"):
        sol = schedule_to_milp(P0, P0_OPTIMAL_SCHEDULE, mode)
        assert abs(sol.tmax - 3.2) < 1e-12
        assert verify_milp_solution(P0, sol, mode) == []
        assert milp_to_schedule(P0, sol) == P0_OPTIMAL_SCHEDULE


def test_single_task_solution():
    sol = schedule_to_milp(ONE, Schedule({1: 0.0}, {1: 1}))
    assert sol.u == {(1, 1): 1} and sol.w == {(1, 1): 1} and sol.x == {(1, 1): 1}
    assert sol.v == {(1, 1): 1}
    assert milp_to_schedule(ONE, sol).start == {1: 0.0}


def test_roundtrip_schedules(small_instances):
    count = 0
    for inst, x in rollout_schedules(small_instances, per=2):
        sol = schedule_to_milp(inst, x)
        assert verify_milp_solution(inst, sol) == []
        assert milp_to_schedule(inst, sol) == x
        assert schedule_to_milp(inst, milp_to_schedule(inst, sol)) == sol
        count += 1
    assert count >= 50


def test_roundtrip_list_schedule():
    sol = schedule_to_milp(P0, P0_LIST_SCHEDULE, "hom")
    assert milp_to_schedule(P0, sol) == P0_LIST_SCHEDULE


def test_infeasible_schedule_rejected():
    start = dict(P0_LIST_SCHEDULE.start)
    start[4] = 0.0
    with pytest.raises(InfeasibleScheduleError):
        schedule_to_milp(P0, Schedule(start, P0_LIST_SCHEDULE.pool))


def test_capacity_violation_consistent():
    start = dict(P0_LIST_SCHEDULE.start)
    start[4] = 0.0
    bad = Schedule(start, P0_LIST_SCHEDULE.pool)
    sol = schedule_to_milp(P0, bad, "hom", strict=False)
    violations = verify_milp_solution(P0, sol, "hom")
    assert any(v.startswith("cap_") for v in violations)
    assert not check_schedule(P0, milp_to_schedule(P0, sol))


def test_tmax_too_small():
    sol = schedule_to_milp(P0, P0_OPTIMAL_SCHEDULE, "hom")
    sol.tmax = 3.0
    assert any(v.startswith("mk_") for v in verify_milp_solution(P0, sol, "hom"))


def test_assignment_violation():
    sol = schedule_to_milp(P0, P0_OPTIMAL_SCHEDULE, "het")
    sol.v[(3, 1)] = 0
    assert "assign_3" in verify_milp_solution(P0, sol, "het")
    with pytest.raises(MalformedSolutionError):
        milp_to_schedule(P0, sol)


def test_feasibility_equivalence_random(small_instances):
    rng = random.Random(5)
    for inst, x in rollout_schedules(small_instances, per=2):
        horizon = sum(t.time for t in inst.tasks)
        for _ in range(3):
            start = {v: (s if rng.random() < 0.5 else float(rng.randint(0, int(horizon))))
                     for v, s in x.start.items()}
            pool = {v: (c if rng.random() < 0.8 else rng.choice(inst.pool_ids)) for v, c in x.pool.items()}
            y = Schedule(start, pool)
            sol = schedule_to_milp(inst, y, strict=False)
            assert (verify_milp_solution(inst, sol) == []) == bool(check_schedule(inst, y))


def test_solution_values_names():
    sol = MilpSolution({1: 0.0}, 1.0, {(1, 1): 1}, {(1, 1): 1}, {(1, 1): 1}, {(1, 1, 2): 0}, {(1, 2): 1})
    assert sol.values() == {"s_1": 0.0, "tmax": 1.0, "u_1_1": 1, "w_1_1": 1, "x_1_1": 1,
                            "y_1_1_2": 0, "v_1_2": 1}
