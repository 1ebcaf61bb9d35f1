"""Generation maps: decision-side objects to concrete feasible schedules.

Three maps share one event simulator (:class:`Simulator`):

* list scheduling, which never idles while some task-pool action is eligible;
* the serial schedule generation scheme :func:`sgs`, which realises a
  schedule order at its earliest feasible start times;
* the skip-extended rollout, which adds an explicit *skip* action that
  advances time to the next completion event, scored by a decreasing rule.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import (DeadlockError, InfeasibleOrderError, InfeasibleTargetError,
                     MalformedRolloutError, SizeCapError)
from .model import Instance, Schedule, actual_time, fits
from .orderspace import DEFAULT_ENUM_CAP, ScheduleOrder, is_feasible_order

Action = tuple[int, int]


class Dispatch(NamedTuple):
    task: int
    pool: int


class _Skip:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "SKIP"

    def __reduce__(self):
        return (_Skip, ())


SKIP = _Skip()
Step = Union[Dispatch, _Skip]


@dataclass(frozen=True)
class Rollout:
    """Extended action sequence: dispatches interleaved with skips."""

    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(
            s if s is SKIP else Dispatch(*s) for s in self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def dispatches(self) -> list[Dispatch]:
        return [s for s in self.steps if s is not SKIP]

    @property
    def n_skips(self) -> int:
        return sum(1 for s in self.steps if s is SKIP)


@dataclass(frozen=True)
class SkipParams:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0 and self.gamma > 0):
            raise ValueError("skip parameters must be strictly positive")


@dataclass(frozen=True)
class ScoreTable:
    scores: Mapping[Action, float]
    skip: SkipParams = field(default_factory=SkipParams)


class MapKind(str, enum.Enum):
    LIST = "list"
    SKIP = "skip"
    SGS = "sgs"


@dataclass(frozen=True)
class PolicyConfig:
    """``mode`` is "greedy" or "sampling".

    ``skip_rule`` selects the skip score: "decreasing" (the default rule),
    "constant" (fixed at log(beta)) or "none" (skip never offered).
    """

    mode: str = "greedy"
    seed: int = 0
    skip_rule: str = "decreasing"

    def __post_init__(self) -> None:
        if self.mode not in ("greedy", "sampling"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.skip_rule not in ("decreasing", "constant", "none"):
            raise ValueError(f"unknown skip rule {self.skip_rule!r}")


class Simulator:
    """Discrete-event state shared by all list-style generation maps.

    A predecessor counts as finished only once released by :meth:`advance`,
    which moves the clock to the next completion and releases every task
    (on any pool) completing at that instant.
    """

    __slots__ = ("inst", "t", "start", "pool", "seq", "running", "avail", "done", "remaining")

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        self.t = 0.0
        self.start: dict[int, float] = {}
        self.pool: dict[int, int] = {}
        self.seq: list[int] = []
        self.running: list[tuple[float, int, int]] = []
        self.avail = {c: list(p.capacity) for c, p in inst.pool.items()}
        self.done: set[int] = set()
        self.remaining: set[int] = set(inst.task_ids)

    def copy(self) -> "Simulator":
        new = Simulator.__new__(Simulator)
        new.inst = self.inst
        new.t = self.t
        new.start = dict(self.start)
        new.pool = dict(self.pool)
        new.seq = list(self.seq)
        new.running = list(self.running)
        new.avail = {c: list(a) for c, a in self.avail.items()}
        new.done = set(self.done)
        new.remaining = set(self.remaining)
        return new

    def ready(self, v: int) -> bool:
        return all(u in self.done for u in self.inst.preds[v])

    def ready_tasks(self) -> list[int]:
        return [v for v in sorted(self.remaining) if self.ready(v)]

    def is_unmasked(self, v: int, c: int) -> bool:
        return (v in self.remaining and c in self.inst.pools_for[v] and self.ready(v)
                and fits(self.inst.task[v].demand, self.avail[c]))

    def unmasked(self) -> list[Action]:
        """Eligible task-pool actions at the current time, sorted."""
        inst = self.inst
        out = []
        for v in self.ready_tasks():
            d = inst.task[v].demand
            for c in inst.pools_for[v]:
                if fits(d, self.avail[c]):
                    out.append((v, c))
        return out

    def dispatch(self, v: int, c: int) -> None:
        end = self.t + actual_time(self.inst, v, c)
        self.start[v] = self.t
        self.pool[v] = c
        self.seq.append(v)
        self.remaining.discard(v)
        self.running.append((end, v, c))
        a = self.avail[c]
        for i, d in enumerate(self.inst.task[v].demand):
            a[i] -= d

    def advance(self) -> None:
        if not self.running:
            raise DeadlockError(f"nothing running at t={self.t:g} with tasks left")
        t = min(r[0] for r in self.running)
        still = []
        for end, v, c in self.running:
            if end <= t:
                self.done.add(v)
                a = self.avail[c]
                for i, d in enumerate(self.inst.task[v].demand):
                    a[i] += d
            else:
                still.append((end, v, c))
        self.running = still
        self.t = t

    def state_key(self) -> tuple:
        return (self.t, frozenset((v, self.pool[v], s) for v, s in self.start.items()))

    def schedule(self) -> Schedule:
        return Schedule(self.start, self.pool, self.seq)


# list scheduling ------------------------------------------------------------


Chooser = Callable[[Simulator, list[Action]], Action]


def list_schedule_with(inst: Instance, choose: Chooser) -> tuple[Schedule, Rollout]:
    """List scheduling with an arbitrary selection rule over eligible actions."""
    sim = Simulator(inst)
    steps: list[Step] = []
    while sim.remaining:
        acts = sim.unmasked()
        if not acts:
            sim.advance()
            continue
        v, c = choose(sim, acts)
        sim.dispatch(v, c)
        steps.append(Dispatch(v, c))
    return sim.schedule(), Rollout(tuple(steps))


def list_schedule(inst: Instance, priority: Mapping[Action, float] | Sequence[Action]) -> tuple[Schedule, Rollout]:
    """List scheduling driven by static scores or by an action sequence.

    With scores the highest-scoring eligible action wins (ties: lowest
    ``(task, pool)``).  With a sequence each task is bound to the pool named
    in the sequence and the earliest eligible entry wins.
    """
    if isinstance(priority, Mapping):
        missing = set(inst.actions) - set(priority)
        if missing:
            raise ValueError(f"scores missing for actions {sorted(missing)[:5]}")
        scores = priority

        def choose(sim: Simulator, acts: list[Action]) -> Action:
            return max(acts, key=lambda a: (scores[a], -a[0], -a[1]))
    else:
        pos: dict[Action, int] = {}
        for i, (v, c) in enumerate(priority):
            pos[(int(v), int(c))] = i
        tasks = [v for v, _ in pos]
        if sorted(tasks) != list(inst.task_ids):
            raise MalformedRolloutError("sequence must name every task exactly once")
        bad = set(pos) - set(inst.actions)
        if bad:
            raise MalformedRolloutError(f"actions not allowed: {sorted(bad)}")

        def choose(sim: Simulator, acts: list[Action]) -> Action:
            bound = [a for a in acts if a in pos]
            if not bound:
                return None  # type: ignore[return-value]
            return min(bound, key=pos.__getitem__)

        sim = Simulator(inst)
        steps: list[Step] = []
        while sim.remaining:
            acts = sim.unmasked()
            a = choose(sim, acts) if acts else None
            if a is None:
                sim.advance()
                continue
            sim.dispatch(*a)
            steps.append(Dispatch(*a))
        return sim.schedule(), Rollout(tuple(steps))
    return list_schedule_with(inst, choose)


# serial SGS -----------------------------------------------------------------


def sgs(inst: Instance, w: ScheduleOrder) -> Schedule:
    """Serial schedule generation: earliest feasible start in prescribed pool order.

    Each task starts at the later of its pool cursor (the previous start on
    that pool) and its predecessors' completion, pushed forward over the
    pool's completion events until its demand fits.  Ready tasks are taken
    lowest id first; the result does not depend on that choice.
    """
    if not is_feasible_order(inst, w):
        raise InfeasibleOrderError(f"{w!r} is not a feasible order")
    succ: dict[int, list[int]] = {v: list(inst.succs[v]) for v in inst.task_ids}
    for seq in w.sequences.values():
        for a, b in zip(seq, seq[1:]):
            succ[a].append(b)
    indeg = {v: 0 for v in inst.task_ids}
    for v in inst.task_ids:
        for u in set(succ[v]):
            indeg[u] += 1
    ready = [v for v in inst.task_ids if indeg[v] == 0]
    heapq.heapify(ready)

    cursor = {c: 0.0 for c in inst.pool_ids}
    avail = {c: list(inst.pool[c].capacity) for c in inst.pool_ids}
    running: dict[int, list[tuple[float, int]]] = {c: [] for c in inst.pool_ids}
    t_dep = {v: 0.0 for v in inst.task_ids}
    start: dict[int, float] = {}
    seq_out: list[int] = []

    def release(c: int, tau: float) -> None:
        keep = []
        for end, u in running[c]:
            if end <= tau:
                for i, d in enumerate(inst.task[u].demand):
                    avail[c][i] += d
            else:
                keep.append((end, u))
        running[c] = keep

    while ready:
        v = heapq.heappop(ready)
        c = w.pool[v]
        demand = inst.task[v].demand
        tau = max(cursor[c], t_dep[v])
        release(c, tau)
        while not fits(demand, avail[c]):
            tau = min(end for end, _ in running[c])
            release(c, tau)
        start[v] = tau
        end = tau + actual_time(inst, v, c)
        running[c].append((end, v))
        for i, d in enumerate(demand):
            avail[c][i] -= d
        cursor[c] = tau
        seq_out.append(v)
        for u in set(succ[v]):
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, u)
        for u in inst.succs[v]:
            t_dep[u] = max(t_dep[u], end)
    return Schedule(start, dict(w.pool), seq_out)


# skip-extended rollout ------------------------------------------------------


def skip_score(params: SkipParams, k: int, n: int) -> float:
    """``log(alpha * exp(-gamma * k / (2 n)) + beta)``; decreasing in ``k``."""
    return math.log(params.alpha * math.exp(-params.gamma * k / (2 * n)) + params.beta)


def _softmax(logits: np.ndarray) -> np.ndarray:
    finite = np.isfinite(logits)
    if not finite.any():
        raise ValueError("every action is masked")
    z = np.where(finite, logits - logits[finite].max(), -np.inf)
    e = np.exp(z)
    return e / e.sum()


def action_distribution(scores: Mapping, masks: Mapping) -> dict:
    """Masked softmax; masks are 0 (allowed) or -inf (masked)."""
    keys = list(scores)
    logits = np.array([scores[a] + masks.get(a, 0.0) for a in keys], dtype=float)
    p = _softmax(logits)
    return {a: float(pa) for a, pa in zip(keys, p)}


def _skip_value(cfg: PolicyConfig, params: SkipParams, k: int, n: int) -> float:
    if cfg.skip_rule == "constant":
        return math.log(params.beta)
    return skip_score(params, k, n)


def rollout_skip_extended(inst: Instance, table: ScoreTable,
                          cfg: PolicyConfig = PolicyConfig()) -> tuple[Schedule, Rollout]:
    """Score-driven list scheduling with an explicit skip action.

    Skip is offered iff some task is running.  Greedy mode takes the best
    task-pool score (ties: lowest ``(task, pool)``) unless the skip score is
    strictly higher.  Sampling mode draws from the masked softmax with a
    generator seeded by ``cfg.seed``.  Every decision, forced or not,
    increments the step counter that feeds the skip score.
    """
    scores = table.scores
    missing = [a for a in inst.actions if a not in scores]
    if missing:
        raise ValueError(f"score table misses actions {missing[:5]}")
    n = inst.n
    sim = Simulator(inst)
    steps: list[Step] = []
    rng = np.random.default_rng(cfg.seed) if cfg.mode == "sampling" else None
    offer_skip = cfg.skip_rule != "none"
    k = 0
    while sim.remaining:
        acts = sim.unmasked()
        skip_ok = offer_skip and bool(sim.running)
        if not acts and not skip_ok:
            if sim.running:
                sim.advance()
                continue
            raise DeadlockError(f"no action available at t={sim.t:g}")
        us = _skip_value(cfg, table.skip, k, n) if skip_ok else -math.inf
        if rng is None:
            choice: Step | None = None
            best = -math.inf
            for a in acts:
                if scores[a] > best:
                    best, choice = scores[a], Dispatch(*a)
            if skip_ok and (choice is None or us > best):
                choice = SKIP
        else:
            logits = np.array([scores[a] for a in acts] + ([us] if skip_ok else []), dtype=float)
            i = int(rng.choice(len(logits), p=_softmax(logits)))
            choice = SKIP if i == len(acts) else Dispatch(*acts[i])
        if choice is SKIP:
            sim.advance()
        else:
            sim.dispatch(choice.task, choice.pool)
        steps.append(choice)
        k += 1
    return sim.schedule(), Rollout(tuple(steps))


def _check_rollout(inst: Instance, rollout: Rollout) -> None:
    tasks = [d.task for d in rollout.dispatches]
    if len(tasks) != inst.n or set(tasks) != set(inst.task_ids):
        raise MalformedRolloutError("rollout must dispatch every task exactly once")
    allowed = set(inst.actions)
    bad = [d for d in rollout.dispatches if tuple(d) not in allowed]
    if bad:
        raise MalformedRolloutError(f"actions not allowed: {bad}")


def realize(inst: Instance, rollout: Rollout) -> Schedule:
    """Schedule induced by an extended action sequence.

    At each state the earliest not-yet-consumed entry that is currently
    allowed is executed (a skip is allowed iff something is running).  When no
    remaining entry is allowed, time advances to the next completion without
    consuming an entry.
    """
    _check_rollout(inst, rollout)
    sim = Simulator(inst)
    pending = list(range(len(rollout.steps)))
    steps = rollout.steps
    while sim.remaining:
        pick = None
        for j, i in enumerate(pending):
            s = steps[i]
            if s is SKIP:
                if sim.running:
                    pick = j
                    break
            elif sim.is_unmasked(s.task, s.pool):
                pick = j
                break
        if pick is None:
            if not sim.running:
                raise MalformedRolloutError(f"rollout stalls at t={sim.t:g}")
            sim.advance()
            continue
        s = steps[pending.pop(pick)]
        if s is SKIP:
            sim.advance()
        else:
            sim.dispatch(s.task, s.pool)
    return sim.schedule()


def replay(inst: Instance, rollout: Rollout) -> Schedule:
    """Execute a rollout step by step, requiring every step to be allowed."""
    _check_rollout(inst, rollout)
    sim = Simulator(inst)
    for k, s in enumerate(rollout.steps):
        if s is SKIP:
            if not sim.running:
                raise InfeasibleTargetError(f"step {k}: skip with nothing running")
            sim.advance()
        else:
            if not sim.is_unmasked(s.task, s.pool):
                raise InfeasibleTargetError(f"step {k}: {tuple(s)} is masked at t={sim.t:g}")
            sim.dispatch(s.task, s.pool)
    if sim.remaining:
        raise InfeasibleTargetError("rollout ends with tasks undispatched")
    return sim.schedule()


def schedule_to_rollout(inst: Instance, x: Schedule) -> Rollout:
    """Dispatch/skip sequence that reproduces ``x`` under the skip-extended map.

    Tasks are dispatched in start-time order (ties by the recorded sequence,
    else by id), with skips until the clock reaches the next start.  Fails if
    some start is not an event time of the partial schedule.
    """
    if x.sequence is not None:
        pos = {v: i for i, v in enumerate(x.sequence)}
        order = sorted(inst.task_ids, key=lambda v: (x.start[v], pos[v]))
    else:
        order = sorted(inst.task_ids, key=lambda v: (x.start[v], v))
    sim = Simulator(inst)
    steps: list[Step] = []
    for v in order:
        tau, c = x.start[v], x.pool[v]
        while sim.t < tau:
            if not sim.running:
                raise InfeasibleTargetError(f"task {v}: start {tau:g} is not an event time")
            sim.advance()
            steps.append(SKIP)
        if sim.t != tau:
            raise InfeasibleTargetError(f"task {v}: start {tau:g} is not an event time")
        if not sim.is_unmasked(v, c):
            raise InfeasibleTargetError(f"task {v} cannot start on pool {c} at {tau:g}")
        sim.dispatch(v, c)
        steps.append(Dispatch(v, c))
    return Rollout(tuple(steps))


def sgs_trace(inst: Instance, w: ScheduleOrder) -> Rollout:
    return schedule_to_rollout(inst, sgs(inst, w))


def construct_optimal_scores(inst: Instance, target: Rollout,
                             params: SkipParams = SkipParams()) -> ScoreTable:
    """Static scores under which greedy skip-extended rollout reproduces ``target``.

    The dispatch taken at decision ``k`` scores ``skip(k) + 2 eps`` and every
    unused pair scores ``skip(N - 1) - 2 eps``, where ``eps`` is a quarter of
    the smallest step-to-step drop of the skip score.
    """
    replay(inst, target)
    n_steps = len(target.steps)
    vals = [skip_score(params, k, inst.n) for k in range(n_steps)]
    drops = [a - b for a, b in zip(vals, vals[1:])]
    if drops and min(drops) <= 0:
        raise ValueError("skip score is not strictly decreasing over the rollout")
    eps = (min(drops) if drops else 1.0) / 4
    low = vals[-1] - 2 * eps
    scores = {a: low for a in inst.actions}
    for k, s in enumerate(target.steps):
        if s is not SKIP:
            scores[(s.task, s.pool)] = vals[k] + 2 * eps
    return ScoreTable(scores, params)


# reachability ---------------------------------------------------------------


def enumerate_reachable(inst: Instance, map_kind: MapKind | str,
                        cap: int = DEFAULT_ENUM_CAP) -> set[Schedule]:
    """Every schedule some decision sequence of the chosen map can produce.

    Depth-first over all branch choices, merging identical simulator states.
    """
    kind = MapKind(map_kind)
    if kind is MapKind.SGS:
        from .orderspace import enumerate_feasible_orders
        return {sgs(inst, w) for w in enumerate_feasible_orders(inst, cap=cap)}
    if inst.n > cap:
        raise SizeCapError(f"{inst.n} tasks exceeds enumeration cap {cap}")
    results: set[Schedule] = set()
    seen: set[tuple] = set()
    stack = [Simulator(inst)]
    while stack:
        sim = stack.pop()
        key = sim.state_key()
        if key in seen:
            continue
        seen.add(key)
        if not sim.remaining:
            results.add(sim.schedule())
            continue
        acts = sim.unmasked()
        if kind is MapKind.LIST and not acts:
            nxt = sim.copy()
            nxt.advance()
            stack.append(nxt)
            continue
        if kind is MapKind.SKIP and sim.running:
            nxt = sim.copy()
            nxt.advance()
            stack.append(nxt)
        if not acts and not sim.running:
            raise DeadlockError(f"no action available at t={sim.t:g}")
        for v, c in reversed(acts):
            nxt = sim.copy()
            nxt.dispatch(v, c)
            stack.append(nxt)
    return results


def iter_steps(rollout: Rollout) -> Iterable[Step]:
    return iter(rollout.steps)
