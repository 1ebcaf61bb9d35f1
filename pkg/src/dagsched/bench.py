"""Benchmark harness: run methods over instances and aggregate makespans.

Method names
------------
``sft``, ``mopnr``, ``cp``, ``tetris``
    list heuristic, best makespan over the three pool rules
``list:<prule>:<poolrule>``
    one list heuristic with a fixed pool rule
``heft``, ``peft``, ``ippts``
    insertion heuristics
``sgs-oracle`` (alias ``oracle``)
    exhaustive optimum over feasible orders (small instances only)
``skip-greedy``, ``skip-sample``
    skip-extended rollout driven by a score table
``localsearch``
    insertion local search started from the ``cp`` list schedule
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import UnknownMethodError
from .genmaps import PolicyConfig, ScoreTable, SkipParams, rollout_skip_extended
from .heuristics import (POOL_RULES, PriorityRule, best_list_heuristic, critical_path,
                         run_insertion_heuristic, run_list_heuristic)
from .model import Instance, Schedule, makespan
from .search import brute_force_optimum, local_search

HEURISTIC_NAMES = ("sft", "mopnr", "cp", "tetris", "heft", "peft", "ippts")
DEFAULT_SKIP = SkipParams(1.0, 0.05, 4.0)


def default_scores(inst: Instance, params: SkipParams = DEFAULT_SKIP) -> ScoreTable:
    """Hand-made table: normalised critical path plus log-speed of the pool."""
    cp = critical_path(inst)
    top = max(cp.values())
    return ScoreTable({(v, c): 3.0 * cp[v] / top + math.log(inst.coefficient(v, c))
                       for v, c in inst.actions}, params)


def rollout_seed(seed: int, i: int) -> int:
    """Seed of the ``i``-th rollout under base ``seed``; nested across sample counts."""
    return int(np.random.SeedSequence([seed, i]).generate_state(1)[0])


def best_of_samples(inst: Instance, table: ScoreTable, samples: int, seed: int) -> tuple[Schedule, float]:
    best = None
    for i in range(samples):
        x, _ = rollout_skip_extended(inst, table, PolicyConfig("sampling", rollout_seed(seed, i)))
        m = makespan(inst, x)
        if best is None or m < best[1]:
            best = (x, m)
    return best


def is_heuristic(method: str) -> bool:
    return method in HEURISTIC_NAMES or method.startswith("list:")


def check_method(method: str) -> None:
    if method in HEURISTIC_NAMES or method in ("sgs-oracle", "oracle", "skip-greedy",
                                               "skip-sample", "localsearch"):
        return
    if method.startswith("list:"):
        parts = method.split(":")
        try:
            if len(parts) != 3:
                raise ValueError
            PriorityRule(parts[1])
            if parts[2] not in [r.value for r in POOL_RULES]:
                raise ValueError
        except ValueError:
            raise UnknownMethodError(f"bad list method {method!r}") from None
        return
    raise UnknownMethodError(f"unknown method {method!r}")


@dataclass
class Row:
    instance: str
    method: str
    makespan: float
    mean: float | None = None
    std: float | None = None
    improvement: float | None = None
    detail: str = ""
    prep_time: float | None = None
    time: float | None = None


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)

    def summary(self) -> dict[str, dict[str, float]]:
        """Per method: mean makespan and mean improvement over instances."""
        out: dict[str, dict[str, float]] = {}
        for m in dict.fromkeys(r.method for r in self.rows):
            rows = [r for r in self.rows if r.method == m]
            entry = {"makespan": statistics.fmean(r.makespan for r in rows)}
            imps = [r.improvement for r in rows if r.improvement is not None]
            if imps:
                entry["improvement"] = statistics.fmean(imps)
            out[m] = entry
        return out

    def to_json(self, timing: bool = True) -> dict:
        rows = []
        for r in self.rows:
            d = asdict(r)
            if not timing:
                d.pop("time")
                d.pop("prep_time")
            rows.append(d)
        return {"rows": rows, "summary": self.summary()}

    def to_csv(self, timing: bool = True) -> str:
        cols = ["instance", "method", "makespan", "mean", "std", "improvement", "detail"]
        if timing:
            cols += ["prep_time", "time"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in cols])
        return buf.getvalue()


def _run_one(inst: Instance, method: str, samples: int, seeds: Sequence[int],
             table_for: Callable[[Instance], ScoreTable], ls_steps: int) -> Row:
    t0 = time.perf_counter()
    prep = None
    mean = std = None
    detail = ""
    if method in ("sft", "mopnr", "cp", "tetris"):
        x, pr = best_list_heuristic(inst, method)
        detail = pr.value
        m = makespan(inst, x)
    elif method.startswith("list:"):
        _, prule, poolrule = method.split(":")
        m = makespan(inst, run_list_heuristic(inst, prule, poolrule))
    elif method in ("heft", "peft", "ippts"):
        m = makespan(inst, run_insertion_heuristic(inst, method))
    elif method in ("sgs-oracle", "oracle"):
        m = brute_force_optimum(inst)[1]
    elif method == "localsearch":
        x0, _ = best_list_heuristic(inst, "cp")
        m = makespan(inst, local_search(inst, x0, ls_steps))
    elif method in ("skip-greedy", "skip-sample"):
        table = table_for(inst)
        prep = time.perf_counter() - t0
        t0 = time.perf_counter()
        if method == "skip-greedy":
            x, _ = rollout_skip_extended(inst, table, PolicyConfig("greedy"))
            m = makespan(inst, x)
        else:
            per_seed = [best_of_samples(inst, table, samples, s)[1] for s in seeds]
            m = min(per_seed)
            mean = statistics.fmean(per_seed)
            std = statistics.pstdev(per_seed)
            detail = f"S({samples})"
    else:
        raise UnknownMethodError(f"unknown method {method!r}")
    return Row("", method, m, mean, std, None, detail, prep, time.perf_counter() - t0)


def run_benchmark(instances: Sequence[tuple[str, Instance]] | Mapping[str, Instance],
                  methods: Sequence[str], samples: int = 64, seeds: Sequence[int] = (0,),
                  scores: Mapping[str, ScoreTable] | None = None, ls_steps: int = 50) -> Report:
    """Run every method on every instance.

    Sampling reports the best of ``samples`` rollouts per seed: ``makespan``
    is the minimum over seeds, ``mean``/``std`` describe the per-seed minima.
    ``improvement`` is ``(best heuristic - makespan) / best heuristic * 100``
    whenever the method list contains a heuristic.
    """
    for m in methods:
        check_method(m)
    items = list(instances.items()) if isinstance(instances, Mapping) else list(instances)
    report = Report()

    for name, inst in items:
        def table_for(i: Instance, _name: str = name) -> ScoreTable:
            if scores is not None and _name in scores:
                return scores[_name]
            return default_scores(i)

        rows = []
        for method in methods:
            row = _run_one(inst, method, samples, seeds, table_for, ls_steps)
            row.instance = name
            rows.append(row)
        heur = [r.makespan for r in rows if is_heuristic(r.method)]
        if heur:
            best = min(heur)
            for r in rows:
                r.improvement = (best - r.makespan) / best * 100.0
        report.rows.extend(rows)
    return report
