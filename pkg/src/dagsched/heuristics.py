"""Classical constructive baselines.

Priority-rule list schedulers (SFT, MOPNR, CP, Tetris) combined with a pool
selection rule (EFT, Tetris score, Balance), and insertion-based timeline
schedulers (HEFT, PEFT, IPPTS) generalised to cumulative vector capacities.
"""

from __future__ import annotations

import enum
import heapq
from typing import Callable, Mapping, Sequence

from .genmaps import Simulator, list_schedule_with
from .model import RESOURCE_TOL, Instance, Schedule, actual_time, makespan


class PriorityRule(str, enum.Enum):
    SFT = "sft"
    MOPNR = "mopnr"
    CP = "cp"
    TETRIS = "tetris"


class PoolRule(str, enum.Enum):
    EFT = "eft"
    TETRIS = "tetris"
    BALANCE = "balance"


class InsertionVariant(str, enum.Enum):
    HEFT = "heft"
    PEFT = "peft"
    IPPTS = "ippts"


def avg_time(inst: Instance, v: int) -> float:
    """Mean actual time over compatible pools."""
    times = [actual_time(inst, v, c) for c in inst.pool_ids if inst.coefficient(v, c) > 0]
    return sum(times) / len(times)


def descendants(inst: Instance) -> dict[int, frozenset[int]]:
    out: dict[int, frozenset[int]] = {}
    for v in reversed(inst.topological_order):
        s: set[int] = set()
        for w in inst.succs[v]:
            s.add(w)
            s |= out[w]
        out[v] = frozenset(s)
    return out


def critical_path(inst: Instance) -> dict[int, float]:
    """Longest path weight starting at each task, weights ``avg_time``, inclusive."""
    cp: dict[int, float] = {}
    for v in reversed(inst.topological_order):
        tail = max((cp[w] for w in inst.succs[v]), default=0.0)
        cp[v] = avg_time(inst, v) + tail
    return cp


def tetris_score(demand: Sequence[float], full: Sequence[float], current: Sequence[float]) -> float:
    """Alignment of a demand with the free capacity, both normalised by the full capacity."""
    return sum((d / f) * (cur / f) for d, f, cur in zip(demand, full, current))


def priority(inst: Instance, rule: PriorityRule | str, state: Simulator | None = None,
             pools: Mapping[int, int] | None = None) -> dict[int, float]:
    """Priority score per task; larger is more urgent.

    Tetris is dynamic: it needs ``state`` and scores each ready task on the
    pool given in ``pools`` (default: the pool chosen by the Tetris pool rule).
    """
    rule = PriorityRule(rule)
    if rule is PriorityRule.SFT:
        return {v: -avg_time(inst, v) for v in inst.task_ids}
    if rule is PriorityRule.MOPNR:
        return {v: float(len(d)) for v, d in descendants(inst).items()}
    if rule is PriorityRule.CP:
        return critical_path(inst)
    if state is None:
        raise ValueError("the Tetris priority needs the current simulation state")
    out = {}
    for v in state.ready_tasks():
        c = pools[v] if pools and v in pools else select_pool(inst, v, PoolRule.TETRIS, state)
        if c is not None:
            out[v] = _tetris(inst, v, c, state)
    return out


def _tetris(inst: Instance, v: int, c: int, state: Simulator) -> float:
    return tetris_score(inst.task[v].demand, inst.pool[c].capacity, state.avail[c])


def select_pool(inst: Instance, v: int, rule: PoolRule | str, state: Simulator) -> int | None:
    """Best currently feasible pool for ``v`` under ``rule``; ``None`` if none fits.

    EFT takes the largest compatibility coefficient, Tetris the largest Tetris
    score and Balance the largest product of the two.  Ties go to the lowest id.
    """
    rule = PoolRule(rule)
    best, best_c = None, None
    for c in inst.pools_for[v]:
        if not state.is_unmasked(v, c):
            continue
        k = inst.coefficient(v, c)
        if rule is PoolRule.EFT:
            score = k
        elif rule is PoolRule.TETRIS:
            score = _tetris(inst, v, c, state)
        else:
            score = _tetris(inst, v, c, state) * k
        if best is None or score > best:
            best, best_c = score, c
    return best_c


def run_list_heuristic(inst: Instance, prule: PriorityRule | str, poolrule: PoolRule | str) -> Schedule:
    """List scheduling: pick each eligible task's pool by ``poolrule``, then the task by ``prule``."""
    prule, poolrule = PriorityRule(prule), PoolRule(poolrule)
    static = None if prule is PriorityRule.TETRIS else priority(inst, prule)

    def choose(sim: Simulator, acts: list[tuple[int, int]]) -> tuple[int, int]:
        chosen: dict[int, int] = {}
        for v in sorted({a[0] for a in acts}):
            c = select_pool(inst, v, poolrule, sim)
            if c is not None:
                chosen[v] = c
        if static is None:
            pr = {v: _tetris(inst, v, c, sim) for v, c in chosen.items()}
        else:
            pr = static
        v = max(chosen, key=lambda u: (pr[u], -u))
        return v, chosen[v]

    return list_schedule_with(inst, choose)[0]


# insertion schedulers ---------------------------------------------------------


def optimistic_cost_table(inst: Instance) -> dict[tuple[int, int], float]:
    """OCT(v, c): optimistic remaining time after ``v`` finishes on ``c``; exits are 0."""
    oct_: dict[tuple[int, int], float] = {}
    for v in reversed(inst.topological_order):
        for c in inst.pool_ids:
            val = 0.0
            for w in inst.succs[v]:
                val = max(val, min(oct_[(w, c2)] + actual_time(inst, w, c2) for c2 in inst.pools_for[w]))
            oct_[(v, c)] = val
    return oct_


def predict_cost_matrix(inst: Instance) -> dict[tuple[int, int], float]:
    """PCM(v, c) with zero communication cost.

    Exit tasks take ``t_act(v, c)``.  Otherwise the maximum over successors
    ``w`` of the minimum over pools ``c2`` of ``PCM(w, c2) + t_act(w, c2) +
    t_act(v, c2)``, where ``t_act(v, c2)`` falls back to the average time of
    ``v`` if ``v`` cannot run on ``c2``.
    """
    pcm: dict[tuple[int, int], float] = {}
    for v in reversed(inst.topological_order):
        tbar = avg_time(inst, v)
        for c in inst.pool_ids:
            if not inst.succs[v]:
                pcm[(v, c)] = actual_time(inst, v, c) if inst.coefficient(v, c) > 0 else tbar
                continue
            val = 0.0
            for w in inst.succs[v]:
                best = min(
                    pcm[(w, c2)] + actual_time(inst, w, c2)
                    + (actual_time(inst, v, c2) if inst.coefficient(v, c2) > 0 else tbar)
                    for c2 in inst.pools_for[w])
                val = max(val, best)
            pcm[(v, c)] = val
    return pcm


class _Profile:
    """Placed intervals on one pool, used for the cumulative fit test."""

    def __init__(self, capacity: Sequence[float]) -> None:
        self.capacity = tuple(capacity)
        self.items: list[tuple[float, float, tuple[float, ...]]] = []

    def fits(self, start: float, end: float, demand: Sequence[float]) -> bool:
        # Usage over [start, end) peaks at start or at some placed start inside.
        probes = [start] + [s for s, _, _ in self.items if start < s < end]
        for tau in probes:
            used = list(demand)
            for s, e, d in self.items:
                if s <= tau < e:
                    for i, x in enumerate(d):
                        used[i] += x
            if any(u > c + RESOURCE_TOL for u, c in zip(used, self.capacity)):
                return False
        return True

    def earliest(self, ready: float, duration: float, demand: Sequence[float]) -> float:
        for tau in sorted({ready} | {e for _, e, _ in self.items if e > ready}):
            if self.fits(tau, tau + duration, demand):
                return tau
        raise AssertionError("an empty timeline always fits")

    def add(self, start: float, end: float, demand: Sequence[float]) -> None:
        self.items.append((start, end, tuple(demand)))


def _insertion_schedule(inst: Instance, prio: Mapping[int, float],
                        cost: Callable[[int, int, float], float]) -> Schedule:
    profiles = {c: _Profile(inst.pool[c].capacity) for c in inst.pool_ids}
    start: dict[int, float] = {}
    pool: dict[int, int] = {}
    end: dict[int, float] = {}
    missing = {v: len(inst.preds[v]) for v in inst.task_ids}
    heap = [(-prio[v], v) for v in inst.task_ids if missing[v] == 0]
    heapq.heapify(heap)
    seq = []
    while heap:
        _, v = heapq.heappop(heap)
        ready = max((end[u] for u in inst.preds[v]), default=0.0)
        best = None
        for c in inst.pools_for[v]:
            d = actual_time(inst, v, c)
            s = profiles[c].earliest(ready, d, inst.task[v].demand)
            key = (cost(v, c, s + d), c)
            if best is None or key < best[0]:
                best = (key, c, s, s + d)
        _, c, s, e = best
        profiles[c].add(s, e, inst.task[v].demand)
        start[v], pool[v], end[v] = s, c, e
        seq.append(v)
        for w in inst.succs[v]:
            missing[w] -= 1
            if missing[w] == 0:
                heapq.heappush(heap, (-prio[w], w))
    return Schedule(start, pool, seq)


def run_insertion_heuristic(inst: Instance, variant: InsertionVariant | str) -> Schedule:
    """HEFT, PEFT or IPPTS with earliest-fit insertion into per-pool resource profiles.

    Tasks are taken from a ready list in nonincreasing priority (ties: lower id).

    * HEFT: priority = critical path, pool = earliest finish.
    * PEFT: priority = mean OCT over compatible pools, pool = min EFT + OCT.
    * IPPTS: priority = mean PCM times out-degree, pool = min EFT + PCM - t_act.
    """
    variant = InsertionVariant(variant)
    if variant is InsertionVariant.HEFT:
        return _insertion_schedule(inst, critical_path(inst), lambda v, c, eft: eft)
    if variant is InsertionVariant.PEFT:
        oct_ = optimistic_cost_table(inst)
        prio = {v: sum(oct_[(v, c)] for c in inst.pools_for[v]) / len(inst.pools_for[v])
                for v in inst.task_ids}
        return _insertion_schedule(inst, prio, lambda v, c, eft: eft + oct_[(v, c)])
    pcm = predict_cost_matrix(inst)
    prio = {v: sum(pcm[(v, c)] for c in inst.pools_for[v]) / len(inst.pools_for[v]) * len(inst.succs[v])
            for v in inst.task_ids}
    return _insertion_schedule(
        inst, prio, lambda v, c, eft: eft + pcm[(v, c)] - actual_time(inst, v, c))


LIST_RULES = tuple(PriorityRule)
POOL_RULES = tuple(PoolRule)


def best_list_heuristic(inst: Instance, prule: PriorityRule | str) -> tuple[Schedule, PoolRule]:
    """Best makespan over the three pool rules (first rule wins ties)."""
    best = None
    for pr in POOL_RULES:
        x = run_list_heuristic(inst, prule, pr)
        m = makespan(inst, x)
        if best is None or m < best[0]:
            best = (m, x, pr)
    return best[1], best[2]

