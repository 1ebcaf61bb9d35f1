"""Command-line interface.

Exit codes: 0 success, 1 domain error (invalid instance, infeasible order,
unknown method, ...), 2 input/output error (missing file, malformed JSON).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .bench import default_scores, run_benchmark
from .datagen import D_MAX, generate_instance, ldd_matrix, load_profile
from .errors import InvalidInstanceError, SchedulingError, UnknownMethodError
from .formats import (FormatError, instance_to_json, load_instance, order_from_json, read_json,
                      round_sig, rollout_to_json, schedule_from_json, schedule_to_json,
                      scores_from_json)
from .genmaps import PolicyConfig, rollout_skip_extended, sgs
from .heuristics import run_insertion_heuristic, run_list_heuristic
from .milp import EPS_STRICT, export_milp
from .model import Instance, check_schedule, makespan, validate_instance
from .orderspace import DEFAULT_ENUM_CAP
from .search import brute_force_optimum, local_search, optimality_gap


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _instance(path: str) -> Instance:
    inst = load_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstanceError("; ".join(problems))
    return inst


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    problems = validate_instance(inst)
    _emit({"valid": not problems, "violations": problems})
    return 0 if not problems else 1


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    method = args.method
    extra = {}
    if method.startswith("list:"):
        parts = method.split(":")
        if len(parts) != 3:
            raise UnknownMethodError(f"expected list:<prule>:<poolrule>, got {method!r}")
        try:
            x = run_list_heuristic(inst, parts[1], parts[2])
        except ValueError as exc:
            raise UnknownMethodError(str(exc)) from None
    elif method in ("heft", "peft", "ippts"):
        x = run_insertion_heuristic(inst, method)
    elif method == "sgs":
        if not args.order:
            raise UnknownMethodError("sgs needs --order")
        x = sgs(inst, order_from_json(read_json(args.order)))
    elif method == "skip":
        table = scores_from_json(read_json(args.scores)) if args.scores else default_scores(inst)
        mode = "sampling" if args.mode in ("sample", "sampling") else "greedy"
        x, rollout = rollout_skip_extended(inst, table, PolicyConfig(mode, args.seed))
        extra["rollout"] = rollout_to_json(rollout)["steps"]
    else:
        raise UnknownMethodError(f"unknown method {method!r}")
    verdict = check_schedule(inst, x)
    doc = schedule_to_json(x, inst)
    doc["feasible"] = verdict.feasible
    doc.update(extra)
    _emit(doc, args.out)
    if args.figure:
        from .plotting import plot_schedule
        plot_schedule(inst, x, args.figure, title=f"{method}: makespan {makespan(inst, x):.6g}")
    return 0


def cmd_oracle(args) -> int:
    inst = _instance(args.instance)
    x, m = brute_force_optimum(inst, cap=args.cap)
    doc = schedule_to_json(x, inst)
    _emit(doc, args.out)
    if args.figure:
        from .plotting import plot_schedule
        plot_schedule(inst, x, args.figure, title=f"optimum: makespan {m:.6g}")
    return 0


def cmd_gap(args) -> int:
    inst = _instance(args.instance)
    g = optimality_gap(inst, args.map, cap=args.cap)
    _emit({"map": args.map, "gap": round_sig(g)})
    return 0


def cmd_localsearch(args) -> int:
    inst = _instance(args.instance)
    if args.init:
        x0 = schedule_from_json(read_json(args.init))
        verdict = check_schedule(inst, x0)
        if not verdict:
            raise SchedulingError("initial schedule infeasible: " + "; ".join(verdict.violations))
    else:
        x0 = run_list_heuristic(inst, "cp", "eft")
    x = local_search(inst, x0, args.steps)
    doc = schedule_to_json(x, inst)
    doc["initial_makespan"] = round_sig(makespan(inst, x0))
    _emit(doc, args.out)
    return 0


def cmd_export_milp(args) -> int:
    inst = _instance(args.instance)
    text = export_milp(inst, args.mode, args.eps)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    inst = generate_instance(args.kind, args.n, args.seed, load_profile(args.profile))
    _emit(instance_to_json(inst), args.out)
    return 0


def cmd_ldd(args) -> int:
    inst = _instance(args.instance)
    mat = ldd_matrix(inst, args.dmax)
    if args.format == "csv":
        lines = [",".join(["task", *map(str, inst.task_ids)])]
        lines += [",".join([str(v), *map(str, row)]) for v, row in zip(inst.task_ids, mat.tolist())]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit({"tasks": list(inst.task_ids), "dmax": args.dmax, "matrix": mat.tolist()}, args.out)
    return 0


def _bench_inputs(paths: Sequence[str]) -> list[tuple[str, Instance]]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise FileNotFoundError(p)
    return [(f.stem, _instance(str(f))) for f in files]


def cmd_bench(args) -> int:
    items = _bench_inputs(args.instances)
    scores = None
    if args.scores:
        scores = {name: scores_from_json(read_json(Path(args.scores) / f"{name}.json"))
                  for name, _ in items if (Path(args.scores) / f"{name}.json").exists()}
    report = run_benchmark(items, args.methods, samples=args.samples, seeds=args.seeds,
                           scores=scores, ls_steps=args.ls_steps)
    _emit(report.to_json(timing=args.timing), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(timing=args.timing))
    if args.figures:
        from .plotting import plot_bench
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        summary = report.summary()
        plot_bench({m: s["makespan"] for m, s in summary.items()}, fig_dir / "makespan.png")
        if all("improvement" in s for s in summary.values()) and summary:
            plot_bench({m: s["improvement"] for m, s in summary.items()},
                       fig_dir / "improvement.png", ylabel="improvement over best heuristic (%)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dagsched", description="Heterogeneous DAG scheduling toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check instance invariants")
    s.add_argument("instance")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="build a schedule with one method")
    s.add_argument("instance")
    s.add_argument("--method", required=True,
                   help="list:<sft|mopnr|cp|tetris>:<eft|tetris|balance>, heft, peft, ippts, sgs, skip")
    s.add_argument("--order", help="schedule order JSON (sgs)")
    s.add_argument("--scores", help="score table JSON (skip); default is a critical-path table")
    s.add_argument("--mode", default="greedy", choices=["greedy", "sample", "sampling"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--figure", help="write a resource-time chart to this path")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("oracle", help="exhaustive optimum over feasible orders")
    s.add_argument("instance")
    s.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    s.add_argument("--out")
    s.add_argument("--figure")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gap", help="optimality gap of a generation map")
    s.add_argument("instance")
    s.add_argument("--map", required=True, choices=["list", "sgs", "skip"])
    s.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("localsearch", help="insertion local search with SGS evaluation")
    s.add_argument("instance")
    s.add_argument("--init", help="initial schedule JSON (default: cp/eft list schedule)")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--out")
    s.set_defaults(func=cmd_localsearch)

    s = sub.add_parser("export-milp", help="write the MILP in LP format")
    s.add_argument("instance")
    s.add_argument("--mode", choices=["hom", "het"], default="het")
    s.add_argument("--eps", type=float, default=EPS_STRICT)
    s.add_argument("--out")
    s.set_defaults(func=cmd_export_milp)

    s = sub.add_parser("gen", help="generate a random heterogeneous instance")
    s.add_argument("--kind", choices=["er", "sbm", "layered"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--profile", default="compgraph", help="tpch, compgraph, homogeneous or a JSON file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("ldd", help="folded longest-directed-distance matrix")
    s.add_argument("instance")
    s.add_argument("--dmax", type=int, default=D_MAX)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_ldd)

    s = sub.add_parser("bench", help="run methods over a set of instances")
    s.add_argument("--instances", nargs="+", required=True, help="instance files or directories")
    s.add_argument("--methods", nargs="+", required=True)
    s.add_argument("--samples", type=int, default=64)
    s.add_argument("--seeds", type=int, nargs="+", default=[0])
    s.add_argument("--scores", help="directory of <instance>.json score tables")
    s.add_argument("--ls-steps", type=int, default=50)
    s.add_argument("--out")
    s.add_argument("--csv")
    s.add_argument("--figures", help="directory for bar charts")
    s.add_argument("--timing", action="store_true", help="include wall times (breaks byte-stability)")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, FormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchedulingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
