"""Big-M MILP formulations in CPLEX LP text format and the solution bijection.

Variables (task ids ``i, j``, pool id ``k``):

``s_i``      start time
``tmax``     makespan
``u_i_j``    0 iff ``s_i < s_j``
``w_i_j``    0 iff ``s_i >= s_j + t_j``
``x_i_j``    1 iff task ``j`` runs when task ``i`` starts (``u_i_j`` and ``w_i_j``)
``y_i_j_k``  ``x_i_j`` and ``v_j_k`` (heterogeneous only)
``v_i_k``    1 iff task ``i`` is on pool ``k`` (heterogeneous only)

Diagonal pairs ``i = j`` are kept; their binaries are forced to 1.  Strict
inequalities are written as ``<= rhs - eps_strict``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InfeasibleScheduleError, MalformedSolutionError, ModeMismatchError
from .model import Instance, Schedule, actual_time, check_schedule

EPS_STRICT = 1e-6
VERIFY_TOL = 1e-9


class MilpMode(str, enum.Enum):
    HOMOGENEOUS = "hom"
    HETEROGENEOUS = "het"


@dataclass
class MilpSolution:
    s: dict[int, float]
    tmax: float
    u: dict[tuple[int, int], int]
    w: dict[tuple[int, int], int]
    x: dict[tuple[int, int], int]
    y: dict[tuple[int, int, int], int] | None = None
    v: dict[tuple[int, int], int] | None = None

    def values(self) -> dict[str, float]:
        """Flat ``name -> value`` map using the LP variable names."""
        out: dict[str, float] = {f"s_{i}": s for i, s in self.s.items()}
        out["tmax"] = self.tmax
        for tag, table in (("u", self.u), ("w", self.w), ("x", self.x), ("y", self.y), ("v", self.v)):
            for key, val in (table or {}).items():
                out[_name(tag, *key)] = val
        return out


@dataclass
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", ">=" or "="
    rhs: float
    strict: bool = False


@dataclass
class Model:
    mode: MilpMode
    rows: list[Row] = field(default_factory=list)
    continuous: list[str] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)

    @property
    def n_variables(self) -> int:
        return len(self.continuous) + len(self.binaries)


def _name(tag: str, *idx: int) -> str:
    return "_".join([tag, *map(str, idx)])


def _num(x: float) -> str:
    return repr(float(x))


def big_m_constants(inst: Instance, mode: MilpMode | str) -> dict:
    """``C1`` (and ``C0``, ``a``) used by the formulation."""
    mode = MilpMode(mode)
    if mode is MilpMode.HOMOGENEOUS:
        return {"C1": sum(t.time for t in inst.tasks)}
    inv = [1.0 / inst.coefficient(i, k) for i in inst.task_ids for k in inst.pool_ids
           if inst.coefficient(i, k) != 0]
    c0 = 2 * max(inv)
    a = {}
    for i in inst.task_ids:
        for k in inst.pool_ids:
            kk = inst.coefficient(i, k)
            a[(i, k)] = c0 if kk == 0 else min(1.0 / kk, c0)
    c1 = (sum(inst.task[i].time * a[(i, k)] for i in inst.task_ids for k in inst.pool_ids)
          + sum(sum(inst.task[i].demand) for i in inst.task_ids))
    return {"C0": c0, "C1": c1, "a": a}


def _check_mode(inst: Instance, mode: MilpMode) -> None:
    if mode is MilpMode.HOMOGENEOUS:
        if len(inst.pools) != 1 or any(inst.coefficient(v, c) != 1.0
                                       for v in inst.task_ids for c in inst.pool_ids):
            raise ModeMismatchError("homogeneous mode needs one pool and K identically 1")


def build_model(inst: Instance, mode: MilpMode | str = MilpMode.HETEROGENEOUS) -> Model:
    mode = MilpMode(mode)
    _check_mode(inst, mode)
    consts = big_m_constants(inst, mode)
    C1 = consts["C1"]
    V, P = inst.task_ids, inst.pool_ids
    het = mode is MilpMode.HETEROGENEOUS
    t = {i: inst.task[i].time for i in V}
    m = Model(mode)
    rows = m.rows

    def add(name, terms, sense, rhs, strict=False):
        coeffs: dict[str, float] = {}
        for var, c in terms:
            coeffs[var] = coeffs.get(var, 0.0) + c
        rows.append(Row(name, {k: c for k, c in coeffs.items() if c != 0}, sense, rhs, strict))

    def duration(i, sign=1.0):
        # Terms for sign * (processing time of i), with any constant part returned separately.
        if het:
            a = consts["a"]
            return [(_name("v", i, k), sign * t[i] * a[(i, k)]) for k in P], 0.0
        return [], sign * t[i]

    for i in V:
        terms, const = duration(i)
        add(f"mk_{i}", [(f"s_{i}", 1.0), ("tmax", -1.0)] + terms, "<=", -const)
    for i, j in inst.edges:
        terms, const = duration(i)
        add(f"prec_{i}_{j}", [(f"s_{i}", 1.0), (f"s_{j}", -1.0)] + terms, "<=", -const)
    for i in V:
        for j in V:
            u, w, x = _name("u", i, j), _name("w", i, j), _name("x", i, j)
            add(f"u1_{i}_{j}", [(f"s_{i}", 1.0), (f"s_{j}", -1.0), (u, -C1)], "<=", 0.0, strict=True)
            add(f"u2_{i}_{j}", [(f"s_{j}", 1.0), (f"s_{i}", -1.0), (u, C1)], "<=", C1)
            terms, const = duration(j, -1.0)
            add(f"w1_{i}_{j}", [(f"s_{i}", 1.0), (f"s_{j}", -1.0), (w, C1)] + terms, "<=",
                C1 - const, strict=True)
            terms, const = duration(j)
            add(f"w2_{i}_{j}", [(f"s_{j}", 1.0), (f"s_{i}", -1.0), (w, -C1)] + terms, "<=", -const)
            add(f"x1_{i}_{j}", [(u, 1.0), (w, 1.0), (x, -1.0)], "<=", 1.0)
            add(f"x2_{i}_{j}", [(u, 1.0), (w, 1.0), (x, -2.0)], ">=", 0.0)
    if het:
        a, C0 = consts["a"], consts["C0"]
        for i in V:
            for j in V:
                for k in P:
                    y, x, vj = _name("y", i, j, k), _name("x", i, j), _name("v", j, k)
                    add(f"y1_{i}_{j}_{k}", [(x, 1.0), (vj, 1.0), (y, -2.0)], ">=", 0.0)
                    add(f"y2_{i}_{j}_{k}", [(x, 1.0), (vj, 1.0), (y, -1.0)], "<=", 1.0)
        for i in V:
            add(f"assign_{i}", [(_name("v", i, k), 1.0) for k in P], "=", 1.0)
        for i in V:
            for k in P:
                add(f"compat_{i}_{k}", [(_name("v", i, k), 1.0)], "<=", 1.0 + C0 - a[(i, k)],
                    strict=True)
        for i in V:
            for k in P:
                for l in range(inst.resources):
                    terms = [(_name("y", i, j, k), inst.task[j].demand[l]) for j in V if j != i]
                    terms.append((_name("v", i, k), C1))
                    add(f"cap_{i}_{k}_{l}", terms, "<=",
                        C1 + inst.pool[k].capacity[l] - inst.task[i].demand[l])
    else:
        cap = inst.pools[0].capacity
        for i in V:
            for l in range(inst.resources):
                terms = [(_name("x", i, j), inst.task[j].demand[l]) for j in V if j != i]
                add(f"cap_{i}_{l}", terms, "<=", cap[l] - inst.task[i].demand[l])

    m.continuous = [f"s_{i}" for i in V] + ["tmax"]
    m.binaries = [_name(tag, i, j) for tag in ("u", "w", "x") for i in V for j in V]
    if het:
        m.binaries += [_name("y", i, j, k) for i in V for j in V for k in P]
        m.binaries += [_name("v", i, k) for i in V for k in P]
    return m


def _render_expr(coeffs: Mapping[str, float]) -> str:
    if not coeffs:
        return "0 tmax"
    parts = []
    for idx, (var, c) in enumerate(coeffs.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = var if mag == 1.0 else f"{_num(mag)} {var}"
        parts.append(f"- {term}" if idx == 0 and sign == "-" else (term if idx == 0 else f"{sign} {term}"))
    return " ".join(parts)


def export_milp(inst: Instance, mode: MilpMode | str = MilpMode.HETEROGENEOUS,
                eps_strict: float = EPS_STRICT) -> str:
    """LP-format text of the chosen formulation; byte-stable for identical inputs."""
    model = build_model(inst, mode)
    lines = [f"\\ {model.mode.name.lower()} makespan model, {inst.n} tasks, {len(inst.pools)} pools",
             "Minimize", " obj: tmax", "Subject To"]
    for row in model.rows:
        rhs = row.rhs - eps_strict if row.strict else row.rhs
        lines.append(f" {row.name}: {_render_expr(row.coeffs)} {row.sense} {_num(rhs)}")
    lines.append("Bounds")
    lines.extend(f" {v} >= 0" for v in model.continuous)
    lines.append("Binaries")
    lines.extend(f" {v}" for v in model.binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


def lp_stats(text: str) -> dict[str, int]:
    """Variable and constraint counts of an exported LP text."""
    section, cons, cont, bins = None, 0, 0, 0
    for line in text.splitlines():
        s = line.strip()
        if s in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            section = s
            continue
        if not s or s.startswith("\\"):
            continue
        if section == "Subject To":
            cons += 1
        elif section == "Bounds":
            cont += 1
        elif section == "Binaries":
            bins += len(s.split())
    return {"constraints": cons, "continuous": cont, "binaries": bins, "variables": cont + bins}


# bijection ---------------------------------------------------------------------


def schedule_to_milp(inst: Instance, x: Schedule, mode: MilpMode | str = MilpMode.HETEROGENEOUS,
                     strict: bool = True) -> MilpSolution:
    """Derive every MILP variable from start times and pool assignments.

    With ``strict=False`` the feasibility precondition is not enforced, which
    lets tests map arbitrary schedules into solution space.
    """
    mode = MilpMode(mode)
    _check_mode(inst, mode)
    if strict:
        verdict = check_schedule(inst, x)
        if not verdict:
            raise InfeasibleScheduleError("; ".join(verdict.violations))
    V, P = inst.task_ids, inst.pool_ids
    s = {i: x.start[i] for i in V}
    if mode is MilpMode.HETEROGENEOUS:
        a = big_m_constants(inst, mode)["a"]
    end = {i: s[i] + actual_time(inst, i, x.pool[i]) if inst.coefficient(i, x.pool[i]) > 0
           else s[i] + inst.task[i].time * a[(i, x.pool[i])] for i in V}
    u = {(i, j): 0 if s[i] < s[j] else 1 for i in V for j in V}
    w = {(i, j): 0 if s[i] >= end[j] else 1 for i in V for j in V}
    xx = {(i, j): u[(i, j)] * w[(i, j)] for i in V for j in V}
    tmax = max(end.values())
    if mode is MilpMode.HOMOGENEOUS:
        return MilpSolution(s, tmax, u, w, xx)
    v = {(i, k): int(x.pool[i] == k) for i in V for k in P}
    y = {(i, j, k): xx[(i, j)] * v[(j, k)] for i in V for j in V for k in P}
    return MilpSolution(s, tmax, u, w, xx, y, v)


def milp_to_schedule(inst: Instance, sol: MilpSolution) -> Schedule:
    """Start times and the pool selected by the one-hot ``v`` (the sole pool if homogeneous)."""
    if sol.v is None:
        if len(inst.pools) != 1:
            raise MalformedSolutionError("solution has no assignment variables")
        c = inst.pool_ids[0]
        return Schedule({i: sol.s[i] for i in inst.task_ids}, {i: c for i in inst.task_ids})
    pool = {}
    for i in inst.task_ids:
        on = [k for k in inst.pool_ids if sol.v.get((i, k), 0) == 1]
        if len(on) != 1 or any(sol.v.get((i, k), 0) not in (0, 1) for k in inst.pool_ids):
            raise MalformedSolutionError(f"task {i}: assignment is not one-hot")
        pool[i] = on[0]
    return Schedule({i: sol.s[i] for i in inst.task_ids}, pool)


def verify_milp_solution(inst: Instance, sol: MilpSolution,
                         mode: MilpMode | str = MilpMode.HETEROGENEOUS,
                         tol: float = VERIFY_TOL) -> list[str]:
    """Names of violated constraints (plus domain violations); empty iff feasible.

    Non-strict rows pass when ``lhs <= rhs + tol``; strict rows need
    ``lhs < rhs - tol``.
    """
    model = build_model(inst, mode)
    vals = sol.values()
    out = []
    for name in model.binaries:
        if vals.get(name) not in (0, 1):
            out.append(f"binary {name} = {vals.get(name)}")
    for name in model.continuous:
        if name not in vals:
            out.append(f"missing {name}")
        elif vals[name] < -tol:
            out.append(f"nonnegativity {name}")
    if out:
        return out
    for row in model.rows:
        lhs = sum(c * vals[var] for var, c in row.coeffs.items())
        if row.sense == "<=":
            ok = lhs < row.rhs - tol if row.strict else lhs <= row.rhs + tol
        elif row.sense == ">=":
            ok = lhs >= row.rhs - tol
        else:
            ok = abs(lhs - row.rhs) <= tol
        if not ok:
            out.append(row.name)
    return out


def homogeneous_ok(inst: Instance) -> bool:
    try:
        _check_mode(inst, MilpMode.HOMOGENEOUS)
    except ModeMismatchError:
        return False
    return True


__all__ = ["EPS_STRICT", "MilpMode", "MilpSolution", "Model", "Row", "big_m_constants",
           "build_model", "export_milp", "lp_stats", "milp_to_schedule", "schedule_to_milp",
           "verify_milp_solution", "homogeneous_ok"]
