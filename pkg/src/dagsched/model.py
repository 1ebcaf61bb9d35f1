"""Problem representation, feasibility checking and makespan evaluation.

Times are binary floats.  A task occupies its pool on the half-open interval
``[start, start + actual_time)``, so a task finishing at ``t`` frees its
resources for a task starting at ``t``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import IncompatiblePairError, InvalidInstanceError

# Slack used when summing resource demands; times are compared exactly.
RESOURCE_TOL = 1e-9


def fits(demand: Sequence[float], available: Sequence[float]) -> bool:
    """Componentwise ``demand <= available`` with a small summation slack."""
    return all(d <= a + RESOURCE_TOL for d, a in zip(demand, available))


@dataclass(frozen=True)
class Task:
    id: int
    time: float
    demand: tuple[float, ...]
    task_type: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "demand", tuple(float(d) for d in self.demand))
        object.__setattr__(self, "time", float(self.time))


@dataclass(frozen=True)
class Pool:
    id: int
    capacity: tuple[float, ...]
    pool_type: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "capacity", tuple(float(c) for c in self.capacity))


@dataclass(frozen=True)
class CompatTable:
    """Compatibility coefficients by (task type, pool type) with per-pair overrides.

    Pairs with no entry resolve to 0, i.e. incompatible.
    """

    by_type: Mapping[tuple[int, int], float] = field(default_factory=dict)
    overrides: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "by_type", MappingProxyType(
            {(int(a), int(b)): float(k) for (a, b), k in dict(self.by_type).items()}))
        object.__setattr__(self, "overrides", MappingProxyType(
            {(int(a), int(b)): float(k) for (a, b), k in dict(self.overrides).items()}))

    @classmethod
    def uniform(cls, k: float = 1.0) -> "CompatTable":
        """Every task type 0 / pool type 0 pair gets coefficient ``k``."""
        return cls({(0, 0): k})

    def coefficient(self, task: Task, pool: Pool) -> float:
        key = (task.id, pool.id)
        if key in self.overrides:
            return self.overrides[key]
        return self.by_type.get((task.task_type, pool.pool_type), 0.0)


@dataclass(frozen=True)
class Instance:
    """A heterogeneous DAG scheduling instance.

    Construction never raises on semantic problems (cycles, dangling edges);
    use :func:`validate_instance` to obtain a report.
    """

    tasks: tuple[Task, ...]
    pools: tuple[Pool, ...]
    edges: tuple[tuple[int, int], ...] = ()
    compat: CompatTable = field(default_factory=CompatTable.uniform)
    resources: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "pools", tuple(self.pools))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        if self.resources is None:
            r = len(self.tasks[0].demand) if self.tasks else (
                len(self.pools[0].capacity) if self.pools else 1)
            object.__setattr__(self, "resources", r)

    # lookups -------------------------------------------------------------

    @cached_property
    def n(self) -> int:
        return len(self.tasks)

    @cached_property
    def task_ids(self) -> tuple[int, ...]:
        return tuple(sorted(t.id for t in self.tasks))

    @cached_property
    def pool_ids(self) -> tuple[int, ...]:
        return tuple(sorted(p.id for p in self.pools))

    @cached_property
    def task(self) -> Mapping[int, Task]:
        return MappingProxyType({t.id: t for t in self.tasks})

    @cached_property
    def pool(self) -> Mapping[int, Pool]:
        return MappingProxyType({p.id: p for p in self.pools})

    @cached_property
    def preds(self) -> Mapping[int, tuple[int, ...]]:
        out: dict[int, set[int]] = {v: set() for v in self.task_ids}
        for u, v in self.edges:
            if u in out and v in out:
                out[v].add(u)
        return MappingProxyType({v: tuple(sorted(s)) for v, s in out.items()})

    @cached_property
    def succs(self) -> Mapping[int, tuple[int, ...]]:
        out: dict[int, set[int]] = {v: set() for v in self.task_ids}
        for u, v in self.edges:
            if u in out and v in out:
                out[u].add(v)
        return MappingProxyType({v: tuple(sorted(s)) for v, s in out.items()})

    @cached_property
    def _coef(self) -> dict[tuple[int, int], float]:
        return {(t.id, p.id): self.compat.coefficient(t, p)
                for t in self.tasks for p in self.pools}

    def coefficient(self, v: int, c: int) -> float:
        return self._coef[(v, c)]

    def actual_time(self, v: int, c: int) -> float:
        return actual_time(self, v, c)

    @cached_property
    def actions(self) -> tuple[tuple[int, int], ...]:
        """Sorted task-pool pairs that are compatible and fit the capacity."""
        return tuple(sorted(
            (v, c) for (v, c), k in self._coef.items()
            if k > 0 and fits(self.task[v].demand, self.pool[c].capacity)))

    @cached_property
    def pools_for(self) -> Mapping[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in self.task_ids}
        for v, c in self.actions:
            out[v].append(c)
        return MappingProxyType({v: tuple(cs) for v, cs in out.items()})

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        order = topological_sort(self.task_ids, self.edges)
        if order is None:
            raise InvalidInstanceError("cycle in E")
        return tuple(order)


def topological_sort(nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[int] | None:
    """Kahn's algorithm with smallest-id-first tie breaking; ``None`` on a cycle."""
    import heapq

    nodes = list(nodes)
    indeg = {v: 0 for v in nodes}
    succ: dict[int, list[int]] = defaultdict(list)
    for u, v in set(edges):
        succ[u].append(v)
        indeg[v] += 1
    heap = [v for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return order if len(order) == len(nodes) else None


class Schedule:
    """Start time and pool for every task.

    ``sequence`` optionally records the order in which a generator dispatched
    the tasks.  It does not take part in equality or hashing; projection uses
    it to order tasks that start simultaneously on one pool.
    """

    __slots__ = ("start", "pool", "sequence", "_key")

    def __init__(self, start: Mapping[int, float], pool: Mapping[int, int],
                 sequence: Sequence[int] | None = None) -> None:
        self.start = MappingProxyType({int(v): float(s) for v, s in start.items()})
        self.pool = MappingProxyType({int(v): int(c) for v, c in pool.items()})
        self.sequence = tuple(sequence) if sequence is not None else None
        self._key = tuple(sorted((v, self.pool[v], self.start[v]) for v in self.start))

    @property
    def key(self) -> tuple[tuple[int, int, float], ...]:
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Schedule) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        body = ", ".join(f"{v}:{c}@{s:g}" for v, c, s in self._key)
        return f"Schedule({body})"

    def end(self, inst: Instance, v: int) -> float:
        return self.start[v] + actual_time(inst, v, self.pool[v])


@dataclass
class Verdict:
    """Outcome of :func:`check_schedule`; truthy iff feasible."""

    violations: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible


# operations ---------------------------------------------------------------


def validate_instance(inst: Instance) -> list[str]:
    """List every violated instance invariant; empty means well-formed."""
    report: list[str] = []
    ids = [t.id for t in inst.tasks]
    if len(set(ids)) != len(ids):
        report.append("duplicate task id")
    pids = [p.id for p in inst.pools]
    if len(set(pids)) != len(pids):
        report.append("duplicate pool id")
    r = inst.resources
    for t in inst.tasks:
        if not t.time > 0:
            report.append(f"task {t.id}: non-positive time")
        if len(t.demand) != r:
            report.append(f"task {t.id}: demand has {len(t.demand)} entries, expected {r}")
        if any(d < 0 for d in t.demand):
            report.append(f"task {t.id}: negative demand")
    for p in inst.pools:
        if len(p.capacity) != r:
            report.append(f"pool {p.id}: capacity has {len(p.capacity)} entries, expected {r}")
        if any(not c > 0 for c in p.capacity):
            report.append(f"pool {p.id}: non-positive capacity")
    for key, k in list(inst.compat.by_type.items()) + list(inst.compat.overrides.items()):
        if k < 0:
            report.append(f"negative compatibility coefficient at {key}")
    idset = set(ids)
    dangling = [(u, v) for u, v in inst.edges if u not in idset or v not in idset]
    for u, v in dangling:
        report.append(f"dangling edge ({u},{v})")
    if any(u == v for u, v in inst.edges):
        report.append("self-loop in E; cycle in E")
    elif topological_sort(idset, [e for e in inst.edges if e not in dangling]) is None:
        report.append("cycle in E")
    for v in inst.task_ids:
        if not inst.pools_for[v]:
            report.append(f"task {v}: empty action set")
    return report


def actual_time(inst: Instance, v: int, c: int) -> float:
    """Base time divided by the compatibility coefficient."""
    k = inst.coefficient(v, c)
    if k <= 0:
        raise IncompatiblePairError(f"task {v} cannot run on pool {c}")
    return inst.task[v].time / k


def action_set(inst: Instance) -> frozenset[tuple[int, int]]:
    return frozenset(inst.actions)


def running_at(inst: Instance, x: Schedule, c: int, tau: float) -> Iterator[int]:
    for v, pool in x.pool.items():
        if pool == c and inst.coefficient(v, c) > 0:
            s = x.start[v]
            if s <= tau < s + actual_time(inst, v, c):
                yield v


def check_schedule(inst: Instance, x: Schedule) -> Verdict:
    """Check every constraint of the scheduling problem.

    Resource usage is sampled at task start times only, which suffices since
    usage on a pool can only increase at a start.
    """
    verdict = Verdict()
    out = verdict.violations
    missing = [v for v in inst.task_ids if v not in x.start or v not in x.pool]
    if missing:
        out.append(f"schedule undefined for tasks {missing}")
        return verdict
    for v in inst.task_ids:
        c = x.pool[v]
        if c not in inst.pool:
            out.append(f"task {v}: unknown pool {c}")
        elif inst.coefficient(v, c) <= 0:
            out.append(f"compatibility: task {v} on pool {c}")
        if not x.start[v] >= 0:
            out.append(f"negative start: task {v}")
    if out:
        return verdict
    for u, v in inst.edges:
        if x.end(inst, u) > x.start[v]:
            out.append(f"precedence: ({u},{v})")
    by_pool: dict[int, list[int]] = defaultdict(list)
    for v in inst.task_ids:
        by_pool[x.pool[v]].append(v)
    for c, members in by_pool.items():
        cap = inst.pool[c].capacity
        ends = {v: x.end(inst, v) for v in members}
        for tau in sorted({x.start[v] for v in members}):
            used = [0.0] * len(cap)
            for v in members:
                if x.start[v] <= tau < ends[v]:
                    for i, d in enumerate(inst.task[v].demand):
                        used[i] += d
            if not fits(used, cap):
                out.append(f"resource: pool {c} at time {tau:g} uses {used} > {list(cap)}")
    return verdict


def makespan(inst: Instance, x: Schedule) -> float:
    """Latest completion time."""
    return max((x.end(inst, v) for v in inst.task_ids), default=0.0)


def single_pool_instance(times: Mapping[int, float], demands: Mapping[int, Sequence[float]] | None,
                         capacity: Sequence[float], edges: Iterable[tuple[int, int]] = ()) -> Instance:
    """Homogeneous instance: one pool, K identically 1."""
    r = len(capacity)
    tasks = [Task(v, t, tuple(demands[v]) if demands else (1.0,) * r) for v, t in times.items()]
    return Instance(tasks, [Pool(1, tuple(capacity))], tuple(edges), CompatTable.uniform(1.0))
