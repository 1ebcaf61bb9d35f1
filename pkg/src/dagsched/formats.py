"""JSON encodings of instances, schedules, orders, score tables, rollouts and MILP solutions."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .genmaps import SKIP, Dispatch, Rollout, ScoreTable, SkipParams
from .milp import MilpSolution
from .model import CompatTable, Instance, Pool, Schedule, Task, makespan
from .orderspace import ScheduleOrder


class FormatError(ValueError):
    """A document does not follow the expected JSON layout."""


def _num(x: float) -> int | float:
    return int(x) if float(x).is_integer() else float(x)


def round_sig(x: float, digits: int = 12) -> float:
    """Round to ``digits`` significant digits for summary output."""
    return float(f"{x:.{digits}g}")


# instance -----------------------------------------------------------------------


def instance_to_json(inst: Instance) -> dict[str, Any]:
    return {
        "resources": inst.resources,
        "tasks": [{"id": t.id, "time": _num(t.time), "demand": [_num(d) for d in t.demand],
                   "type": t.task_type} for t in inst.tasks],
        "pools": [{"id": p.id, "capacity": [_num(c) for c in p.capacity], "type": p.pool_type}
                  for p in inst.pools],
        "edges": [[u, v] for u, v in inst.edges],
        "compat": {
            "by_type": [[a, b, k] for (a, b), k in sorted(inst.compat.by_type.items())],
            "overrides": [[a, b, k] for (a, b), k in sorted(inst.compat.overrides.items())],
        },
    }


def instance_from_json(data: Mapping[str, Any]) -> Instance:
    try:
        tasks = [Task(int(t["id"]), float(t["time"]), tuple(float(d) for d in t["demand"]),
                      int(t.get("type", 0))) for t in data["tasks"]]
        pools = [Pool(int(p["id"]), tuple(float(c) for c in p["capacity"]), int(p.get("type", 0)))
                 for p in data["pools"]]
        edges = tuple((int(u), int(v)) for u, v in data.get("edges", []))
        compat_doc = data.get("compat", {"by_type": [[0, 0, 1.0]]})
        compat = CompatTable(
            {(int(a), int(b)): float(k) for a, b, k in compat_doc.get("by_type", [])},
            {(int(a), int(b)): float(k) for a, b, k in compat_doc.get("overrides", [])},
        )
        resources = int(data["resources"]) if "resources" in data else None
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed instance: {exc!r}") from exc
    return Instance(tasks, pools, edges, compat, resources)


# schedule ------------------------------------------------------------------------


def schedule_to_json(x: Schedule, inst: Instance | None = None) -> dict[str, Any]:
    order = x.sequence if x.sequence is not None else sorted(x.start)
    doc: dict[str, Any] = {"assignments": [{"task": v, "pool": x.pool[v], "start": x.start[v]}
                                           for v in order]}
    if inst is not None:
        doc["makespan"] = round_sig(makespan(inst, x))
    return doc


def schedule_from_json(data: Mapping[str, Any]) -> Schedule:
    try:
        rows = data["assignments"]
        return Schedule({int(r["task"]): float(r["start"]) for r in rows},
                        {int(r["task"]): int(r["pool"]) for r in rows},
                        [int(r["task"]) for r in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed schedule: {exc!r}") from exc


# order ---------------------------------------------------------------------------


def order_to_json(w: ScheduleOrder) -> dict[str, Any]:
    return {"order": [{"task": v, "pool": c, "rank": r}
                      for c, seq in w.sequences.items() for r, v in enumerate(seq, start=1)]}


def order_from_json(data: Mapping[str, Any]) -> ScheduleOrder:
    try:
        rows = data["order"]
        return ScheduleOrder({int(r["task"]): int(r["pool"]) for r in rows},
                             {int(r["task"]): int(r["rank"]) for r in rows})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed order: {exc!r}") from exc


# score table ---------------------------------------------------------------------


def scores_to_json(table: ScoreTable) -> dict[str, Any]:
    return {"scores": [[v, c, u] for (v, c), u in sorted(table.scores.items())],
            "skip": {"alpha": table.skip.alpha, "beta": table.skip.beta, "gamma": table.skip.gamma}}


def scores_from_json(data: Mapping[str, Any]) -> ScoreTable:
    try:
        scores = {(int(v), int(c)): float(u) for v, c, u in data["scores"]}
        sk = data.get("skip", {})
        params = SkipParams(float(sk.get("alpha", 1.0)), float(sk.get("beta", 1.0)),
                            float(sk.get("gamma", 1.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed score table: {exc!r}") from exc
    return ScoreTable(scores, params)


# rollout -------------------------------------------------------------------------


def rollout_to_json(r: Rollout) -> dict[str, Any]:
    return {"steps": ["skip" if s is SKIP else [s.task, s.pool] for s in r.steps]}


def rollout_from_json(data: Mapping[str, Any]) -> Rollout:
    try:
        return Rollout(tuple(SKIP if s == "skip" else Dispatch(int(s[0]), int(s[1]))
                             for s in data["steps"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"malformed rollout: {exc!r}") from exc


# MILP solution -------------------------------------------------------------------


def milp_solution_to_json(sol: MilpSolution) -> dict[str, Any]:
    def pairs(table):
        return None if table is None else [[*k, val] for k, val in sorted(table.items())]

    return {"s": [[i, s] for i, s in sorted(sol.s.items())], "tmax": sol.tmax,
            "u": pairs(sol.u), "w": pairs(sol.w), "x": pairs(sol.x),
            "y": pairs(sol.y), "v": pairs(sol.v)}


def milp_solution_from_json(data: Mapping[str, Any]) -> MilpSolution:
    def table(rows):
        return None if rows is None else {tuple(int(a) for a in r[:-1]): r[-1] for r in rows}

    return MilpSolution({int(i): float(s) for i, s in data["s"]}, float(data["tmax"]),
                        table(data["u"]), table(data["w"]), table(data["x"]),
                        table(data.get("y")), table(data.get("v")))


# files ---------------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def write_json(obj: Any, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_instance(path: str | Path) -> Instance:
    return instance_from_json(read_json(path))
