"""The eight-task single-pool counterexample on which list scheduling is suboptimal.

Every list-scheduling run on ``P0`` yields ``P0_LIST_SCHEDULE`` (makespan 4)
while ``P0_OPTIMAL_SCHEDULE`` reaches 3.2.
"""

from .model import CompatTable, Instance, Pool, Schedule, Task

_TIMES = {1: 1.0, 2: 1.1, 3: 1.2, 4: 1.0, 5: 1.0, 6: 1.0, 7: 1.0, 8: 1.0}
_DEMANDS = {v: (2.0 if v == 4 else 1.0,) for v in _TIMES}

P0 = Instance(
    tasks=tuple(Task(v, _TIMES[v], _DEMANDS[v]) for v in sorted(_TIMES)),
    pools=(Pool(1, (3.0,)),),
    edges=((1, 4), (1, 6), (4, 7), (2, 5), (5, 8)),
    compat=CompatTable.uniform(1.0),
)

P0_LIST_SCHEDULE = Schedule(
    start={1: 0.0, 2: 0.0, 3: 0.0, 6: 1.0, 5: 1.1, 4: 2.0, 8: 2.1, 7: 3.0},
    pool={v: 1 for v in _TIMES},
)

P0_OPTIMAL_SCHEDULE = Schedule(
    start={1: 0.0, 2: 0.0, 3: 0.0, 4: 1.1, 5: 1.2, 6: 2.1, 7: 2.1, 8: 2.2},
    pool={v: 1 for v in _TIMES},
)
