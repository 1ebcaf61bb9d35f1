"""Exhaustive optimum, generation-map gaps and insertion local search."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .genmaps import MapKind, enumerate_reachable, sgs
from .model import Instance, Schedule, makespan
from .orderspace import (DEFAULT_ENUM_CAP, ScheduleOrder, enumerate_feasible_orders,
                         insertion_neighbors, project)

OPT_TOL = 1e-9


def brute_force_optimum(inst: Instance, cap: int = DEFAULT_ENUM_CAP) -> tuple[Schedule, float]:
    """Global optimum as the best SGS image over all feasible orders.

    The first minimiser in enumeration order is returned.
    """
    best: tuple[Schedule, float] | None = None
    for w in enumerate_feasible_orders(inst, cap=cap):
        x = sgs(inst, w)
        m = makespan(inst, x)
        if best is None or m < best[1]:
            best = (x, m)
    assert best is not None
    return best


def optimality_gap(inst: Instance, map_kind: MapKind | str, cap: int = DEFAULT_ENUM_CAP) -> float:
    """Best makespan reachable by the generation map minus the global optimum."""
    reach = enumerate_reachable(inst, map_kind, cap=cap)
    best = min(makespan(inst, x) for x in reach)
    return best - brute_force_optimum(inst, cap=cap)[1]


def _best(inst: Instance, candidates: Iterable[ScheduleOrder], incumbent: ScheduleOrder,
          cache: dict | None = None) -> tuple[ScheduleOrder, float]:
    def value(w: ScheduleOrder) -> float:
        if cache is None:
            return makespan(inst, sgs(inst, w))
        if w not in cache:
            cache[w] = makespan(inst, sgs(inst, w))
        return cache[w]

    best_w, best_m = incumbent, value(incumbent)
    for w in sorted(candidates):
        m = value(w)
        if m < best_m:
            best_w, best_m = w, m
    return best_w, best_m


def local_search_step(inst: Instance, w: ScheduleOrder) -> tuple[ScheduleOrder, float]:
    """Best SGS makespan over ``w`` and its insertion neighbours.

    ``w`` is kept unless a neighbour is strictly better; among equally good
    neighbours the lexicographically smallest order key wins.
    """
    return _best(inst, insertion_neighbors(inst, w), w)


def local_search(inst: Instance, x0: Schedule, max_steps: int = 100) -> Schedule:
    """Iterate insertion steps from ``project(x0)`` until a fixed point or ``max_steps``.

    Returns the better of the final SGS schedule and ``x0`` itself.
    """
    w = project(inst, x0)
    cache: dict[ScheduleOrder, float] = {}
    m = None
    for _ in range(max_steps):
        nxt, m_next = _best(inst, insertion_neighbors(inst, w), w, cache)
        if nxt == w:
            break
        w, m = nxt, m_next
    x = sgs(inst, w)
    return x if makespan(inst, x) <= makespan(inst, x0) else x0


def local_search_trace(inst: Instance, x0: Schedule, max_steps: int = 100) -> list[float]:
    """Makespans visited by :func:`local_search`, starting with that of ``sgs(project(x0))``."""
    w = project(inst, x0)
    cache: dict[ScheduleOrder, float] = {}
    trace = [makespan(inst, sgs(inst, w))]
    for _ in range(max_steps):
        nxt, m = _best(inst, insertion_neighbors(inst, w), w, cache)
        if nxt == w:
            break
        w = nxt
        trace.append(m)
    return trace


def insertion_connectivity(inst: Instance, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """Whether every feasible order reaches an optimal one along insertion moves.

    Builds the directed insertion graph on the feasible order space and runs a
    reverse breadth-first search from the set of optimal orders.
    """
    orders = list(enumerate_feasible_orders(inst, cap=cap))
    values = {w: makespan(inst, sgs(inst, w)) for w in orders}
    opt = min(values.values())
    feasible = set(orders)
    rev: dict[ScheduleOrder, list[ScheduleOrder]] = {w: [] for w in orders}
    for w in orders:
        for nb in insertion_neighbors(inst, w, feasible=feasible):
            rev[nb].append(w)
    seen = {w for w in orders if values[w] <= opt + OPT_TOL}
    queue = deque(seen)
    while queue:
        w = queue.popleft()
        for u in rev[w]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == len(orders)
