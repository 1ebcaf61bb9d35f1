"""Heterogeneous DAG scheduling: generation maps, order-space tools, baselines and oracles."""

from .errors import SchedulingError
from .genmaps import (SKIP, Dispatch, MapKind, PolicyConfig, Rollout, ScoreTable, SkipParams,
                      action_distribution, construct_optimal_scores, enumerate_reachable,
                      list_schedule, realize, rollout_skip_extended, schedule_to_rollout, sgs,
                      skip_score)
from .model import (CompatTable, Instance, Pool, Schedule, Task, action_set, actual_time,
                    check_schedule, makespan, validate_instance)
from .orderspace import (ScheduleOrder, augmented_graph, canonicalize, enumerate_feasible_orders,
                         enumerate_orders, insertion_neighbors, is_feasible_order, project)
from .p0 import P0, P0_LIST_SCHEDULE, P0_OPTIMAL_SCHEDULE
from .search import (brute_force_optimum, insertion_connectivity, local_search,
                     local_search_step, optimality_gap)

__version__ = "0.1.0"

__all__ = [
    "SKIP", "CompatTable", "Dispatch", "Instance", "MapKind", "P0", "P0_LIST_SCHEDULE",
    "P0_OPTIMAL_SCHEDULE", "PolicyConfig", "Pool", "Rollout", "Schedule", "ScheduleOrder",
    "SchedulingError", "ScoreTable", "SkipParams", "Task", "action_distribution", "action_set",
    "actual_time", "augmented_graph", "brute_force_optimum", "canonicalize", "check_schedule",
    "construct_optimal_scores", "enumerate_feasible_orders", "enumerate_orders",
    "enumerate_reachable", "insertion_connectivity", "insertion_neighbors", "is_feasible_order",
    "list_schedule", "local_search", "local_search_step", "makespan", "optimality_gap", "project",
    "realize", "rollout_skip_extended", "schedule_to_rollout", "sgs", "skip_score",
    "validate_instance",
]
