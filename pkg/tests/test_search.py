import networkx as nx
import pytest

from dagsched.errors import SizeCapError
from dagsched.genmaps import sgs
from dagsched.heuristics import run_list_heuristic
from dagsched.model import CompatTable, Instance, Pool, Task, makespan, single_pool_instance
from dagsched.orderspace import ScheduleOrder, enumerate_feasible_orders, insertion_neighbors, project
from dagsched.p0 import P0, P0_LIST_SCHEDULE
from dagsched.search import (brute_force_optimum, insertion_connectivity, local_search, local_search_step,
                             local_search_trace, optimality_gap)


def test_optimum_p0():
    x, m = brute_force_optimum(P0)
    assert abs(m - 3.2) < 1e-12
    assert abs(makespan(P0, x) - 3.2) < 1e-12


def test_optimum_single_task_fastest_pool():
    inst = Instance([Task(1, 2.0, (1.0,))], [Pool(1, (1.0,)), Pool(2, (1.0,))], (),
                    CompatTable({}, {(1, 1): 1.0, (1, 2): 2.0}))
    x, m = brute_force_optimum(inst)
    assert m == 1.0 and x.pool[1] == 2


def test_optimum_full_parallelism():
    inst = single_pool_instance({1: 1, 2: 1, 3: 1}, None, (3,))
    assert brute_force_optimum(inst)[1] == 1.0


def test_optimum_cap():
    inst = single_pool_instance({v: 1 for v in range(1, 10)}, None, (1,))
    with pytest.raises(SizeCapError):
        brute_force_optimum(inst)


def test_gaps_p0():
    assert abs(optimality_gap(P0, "list") - 0.8) < 1e-12
    assert abs(optimality_gap(P0, "sgs")) < 1e-12
    assert abs(optimality_gap(P0, "skip")) < 1e-12


def test_gaps_nonnegative(small_instances):
    for inst in small_instances[:20]:
        assert optimality_gap(inst, "list") >= -1e-12
        assert abs(optimality_gap(inst, "sgs")) < 1e-12
        assert abs(optimality_gap(inst, "skip")) < 1e-12


def test_step_fixed_point_at_optimum():
    x, _ = brute_force_optimum(P0)
    w = project(P0, x)
    assert local_search_step(P0, w)[0] == w


def test_step_two_independent_tasks():
    inst = single_pool_instance({1: 1, 2: 2}, None, (1,))
    w1 = ScheduleOrder.from_sequences({1: [1, 2]})
    w2 = ScheduleOrder.from_sequences({1: [2, 1]})
    assert makespan(inst, sgs(inst, w1)) == makespan(inst, sgs(inst, w2)) == 3.0
    assert local_search_step(inst, w1) == (w1, 3.0)


def test_step_strict_improvement():
    # the wide task 3 splits 1 and 2 apart; moving 2 forward lets them pair up
    inst = single_pool_instance({1: 1, 2: 1, 3: 1}, {1: (1,), 2: (1,), 3: (2,)}, (2,))
    w = ScheduleOrder.from_sequences({1: [1, 3, 2]})
    assert makespan(inst, sgs(inst, w)) == 3.0
    nxt, m = local_search_step(inst, w)
    assert m == 2.0 and nxt != w


def test_step_monotone(small_instances):
    for inst in small_instances[:15]:
        for w in list(enumerate_feasible_orders(inst))[:10]:
            _, m = local_search_step(inst, w)
            assert m <= makespan(inst, sgs(inst, w)) + 1e-12


def test_local_search_p0():
    x = local_search(P0, P0_LIST_SCHEDULE, max_steps=20)
    assert abs(makespan(P0, x) - 3.2) < 1e-12
    trace = local_search_trace(P0, P0_LIST_SCHEDULE, max_steps=20)
    assert trace[0] == 4.0 and abs(trace[-1] - 3.2) < 1e-12
    assert len(trace) - 1 <= 8
    assert all(a >= b for a, b in zip(trace, trace[1:]))


def test_local_search_from_optimum():
    x, m = brute_force_optimum(P0)
    assert makespan(P0, local_search(P0, x)) == m


def test_local_search_sandwich(small_instances):
    for inst in small_instances:
        x0 = run_list_heuristic(inst, "cp", "eft")
        _, opt = brute_force_optimum(inst)
        m = makespan(inst, local_search(inst, x0, max_steps=20))
        assert opt - 1e-9 <= m <= makespan(inst, x0) + 1e-9


def test_connectivity_p0_and_single():
    assert insertion_connectivity(P0)
    assert insertion_connectivity(single_pool_instance({1: 1}, None, (1,)))


def test_connectivity_matches_networkx(small_instances):
    for inst in small_instances[:10]:
        orders = list(enumerate_feasible_orders(inst))
        g = nx.DiGraph()
        g.add_nodes_from(orders)
        for w in orders:
            g.add_edges_from((w, nb) for nb in insertion_neighbors(inst, w))
        vals = {w: makespan(inst, sgs(inst, w)) for w in orders}
        best = min(vals.values())
        targets = {w for w in orders if vals[w] <= best + 1e-9}
        expected = all(any(t in nx.descendants(g, w) or t == w for t in targets) for w in orders)
        assert insertion_connectivity(inst) == expected
