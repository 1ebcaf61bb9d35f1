"""Schedule orders: pool assignment plus within-pool rank.

A schedule order fixes, for every pool, the sequence in which its tasks
start.  It is feasible exactly when every assignment is an allowed action and
the precedence edges together with the within-pool chains form a DAG.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import IncompleteSequenceError, SizeCapError
from .model import Instance, Schedule, topological_sort

ActionSequence = Sequence[tuple[int, int]]

DEFAULT_ENUM_CAP = 8


class ScheduleOrder:
    """Pool per task and 1-based rank of the task within its pool."""

    __slots__ = ("pool", "rank", "_sequences", "_key")

    def __init__(self, pool: Mapping[int, int], rank: Mapping[int, int]) -> None:
        if set(pool) != set(rank):
            raise ValueError("pool and rank maps must cover the same tasks")
        self.pool = MappingProxyType({int(v): int(c) for v, c in pool.items()})
        self.rank = MappingProxyType({int(v): int(r) for v, r in rank.items()})
        seqs: dict[int, list[int]] = defaultdict(list)
        for v in sorted(self.pool, key=lambda v: (self.pool[v], self.rank[v])):
            seqs[self.pool[v]].append(v)
        for c, seq in seqs.items():
            if [self.rank[v] for v in seq] != list(range(1, len(seq) + 1)):
                raise ValueError(f"ranks on pool {c} are not 1..{len(seq)}")
        self._sequences = MappingProxyType({c: tuple(s) for c, s in sorted(seqs.items())})
        self._key = tuple(self._sequences.items())

    @classmethod
    def from_sequences(cls, sequences: Mapping[int, Sequence[int]]) -> "ScheduleOrder":
        pool, rank = {}, {}
        for c, seq in sequences.items():
            for i, v in enumerate(seq, start=1):
                if v in pool:
                    raise ValueError(f"task {v} appears twice")
                pool[v], rank[v] = c, i
        return cls(pool, rank)

    @property
    def sequences(self) -> Mapping[int, tuple[int, ...]]:
        """Tasks of each non-empty pool in rank order, pools ascending."""
        return self._sequences

    @property
    def key(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """Canonical encoding; also the lexicographic tie-break key."""
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScheduleOrder) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "ScheduleOrder") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        body = "; ".join(f"{c}: {' '.join(map(str, s))}" for c, s in self._key)
        return f"ScheduleOrder({body})"


@dataclass(frozen=True)
class AugmentedGraph:
    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]


def project(inst: Instance, x: Schedule) -> ScheduleOrder:
    """Within-pool start order of a schedule.

    Simultaneous starts on one pool are ordered by the schedule's recorded
    dispatch sequence when it has one, otherwise by ascending task id.
    """
    if x.sequence is not None:
        pos = {v: i for i, v in enumerate(x.sequence)}
        tie = pos.__getitem__
    else:
        tie = int
    seqs: dict[int, list[int]] = defaultdict(list)
    for v in sorted(inst.task_ids, key=lambda v: (x.start[v], tie(v))):
        seqs[x.pool[v]].append(v)
    return ScheduleOrder.from_sequences(seqs)


def _chain_edges(w: ScheduleOrder) -> list[tuple[int, int]]:
    return [(a, b) for seq in w.sequences.values() for a, b in zip(seq, seq[1:])]


def augmented_graph(inst: Instance, w: ScheduleOrder) -> AugmentedGraph:
    edges = set(inst.edges)
    for seq in w.sequences.values():
        edges.update(itertools.combinations(seq, 2))
    return AugmentedGraph(inst.task_ids, frozenset(edges))


def is_feasible_order(inst: Instance, w: ScheduleOrder) -> bool:
    if set(w.pool) != set(inst.task_ids):
        return False
    if any(w.pool[v] not in inst.pools_for[v] for v in inst.task_ids):
        return False
    # Consecutive-rank edges have the same reachability as the full pool relation.
    return topological_sort(inst.task_ids, list(inst.edges) + _chain_edges(w)) is not None


def canonicalize(inst: Instance, seq: ActionSequence) -> ScheduleOrder:
    """Order obtained by reading off each pool's subsequence of actions."""
    seen: set[int] = set()
    seqs: dict[int, list[int]] = defaultdict(list)
    allowed = set(inst.actions)
    for v, c in seq:
        if v in seen:
            raise IncompleteSequenceError(f"task {v} appears twice")
        if (v, c) not in allowed:
            raise IncompleteSequenceError(f"({v},{c}) is not an allowed action")
        seen.add(v)
        seqs[c].append(v)
    missing = set(inst.task_ids) - seen
    if missing:
        raise IncompleteSequenceError(f"tasks {sorted(missing)} missing from sequence")
    return ScheduleOrder.from_sequences(seqs)


def order_to_sequence(w: ScheduleOrder) -> list[tuple[int, int]]:
    """Canonical representative: pool blocks concatenated in pool-id order."""
    return [(v, c) for c, seq in w.sequences.items() for v in seq]


def insertion_neighbors(inst: Instance, w: ScheduleOrder,
                        feasible: set[ScheduleOrder] | None = None) -> set[ScheduleOrder]:
    """Feasible orders reachable by moving one task to any slot of any allowed pool.

    ``feasible`` may supply the precomputed feasible order space, replacing
    the acyclicity test by a membership test.
    """
    out: set[ScheduleOrder] = set()
    base = {c: list(seq) for c, seq in w.sequences.items()}
    for v in inst.task_ids:
        home = w.pool[v]
        stripped = dict(base)
        stripped[home] = [u for u in base[home] if u != v]
        for c in inst.pools_for[v]:
            target = stripped.get(c, [])
            for pos in range(len(target) + 1):
                seqs = dict(stripped)
                seqs[c] = target[:pos] + [v] + target[pos:]
                cand = ScheduleOrder.from_sequences({k: s for k, s in seqs.items() if s})
                if cand == w:
                    continue
                ok = cand in feasible if feasible is not None else is_feasible_order(inst, cand)
                if ok:
                    out.add(cand)
    return out


def _ancestors(inst: Instance) -> dict[int, frozenset[int]]:
    anc: dict[int, frozenset[int]] = {}
    for v in inst.topological_order:
        s: set[int] = set()
        for u in inst.preds[v]:
            s.add(u)
            s |= anc[u]
        anc[v] = frozenset(s)
    return anc


def _pool_permutations(tasks: Sequence[int], anc: Mapping[int, frozenset[int]] | None) -> Iterator[tuple[int, ...]]:
    """Depth-first permutations; with ``anc`` only those respecting ancestry."""
    n = len(tasks)
    chosen: list[int] = []
    used = [False] * n
    members = set(tasks)

    def rec() -> Iterator[tuple[int, ...]]:
        if len(chosen) == n:
            yield tuple(chosen)
            return
        placed = set(chosen)
        for i, v in enumerate(tasks):
            if used[i]:
                continue
            if anc is not None and not (anc[v] & members) <= placed:
                continue
            used[i] = True
            chosen.append(v)
            yield from rec()
            chosen.pop()
            used[i] = False

    yield from rec()


def enumerate_orders(inst: Instance, feasible_only: bool = True,
                     cap: int = DEFAULT_ENUM_CAP) -> Iterator[ScheduleOrder]:
    """Every order in the order space, or only the feasible ones.

    Deterministic: assignments in lexicographic (task id, pool id) order,
    then per pool (ascending id) depth-first over rank slots.
    """
    if inst.n > cap:
        raise SizeCapError(f"{inst.n} tasks exceeds enumeration cap {cap}")
    tasks = inst.task_ids
    anc = _ancestors(inst) if feasible_only else None
    for assignment in itertools.product(*(inst.pools_for[v] for v in tasks)):
        groups: dict[int, list[int]] = defaultdict(list)
        for v, c in zip(tasks, assignment):
            groups[c].append(v)
        pools = sorted(groups)
        for combo in itertools.product(*(_pool_permutations(groups[c], anc) for c in pools)):
            w = ScheduleOrder.from_sequences(dict(zip(pools, combo)))
            if not feasible_only or is_feasible_order(inst, w):
                yield w


def enumerate_feasible_orders(inst: Instance, cap: int = DEFAULT_ENUM_CAP) -> Iterator[ScheduleOrder]:
    return enumerate_orders(inst, feasible_only=True, cap=cap)


def order_from_pairs(triples: Iterable[tuple[int, int, int]]) -> ScheduleOrder:
    """Build from ``(task, pool, rank)`` triples."""
    pool, rank = {}, {}
    for v, c, r in triples:
        pool[v], rank[v] = c, r
    return ScheduleOrder(pool, rank)
