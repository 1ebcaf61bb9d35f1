import json
import subprocess
import sys
from pathlib import Path

import pytest

from dagsched.cli import main
from dagsched.formats import instance_to_json, order_to_json, scores_to_json, write_json
from dagsched.genmaps import ScoreTable
from dagsched.orderspace import ScheduleOrder
from dagsched.p0 import P0

from conftest import P0_PATH

P0_FILE = str(P0_PATH)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", P0_FILE)
    assert code == 0 and json.loads(out) == {"valid": True, "violations": []}


def test_validate_reports_cycle(capsys, tmp_path):
    doc = instance_to_json(P0)
    doc["edges"].append([7, 1])
    path = tmp_path / "cyc.json"
    write_json(doc, path)
    code, out, _ = run(capsys, "validate", path)
    assert code == 1 and any("cycle in E" in v for v in json.loads(out)["violations"])
    code, _, err = run(capsys, "oracle", path)
    assert code == 1 and "cycle" in err


def test_solve_list(capsys):
    code, out, _ = run(capsys, "solve", P0_FILE, "--method", "list:cp:eft")
    doc = json.loads(out)
    assert code == 0 and doc["makespan"] == 4 and doc["feasible"]


@pytest.mark.parametrize("method", ["heft", "peft", "ippts"])
def test_solve_insertion(capsys, method):
    code, out, _ = run(capsys, "solve", P0_FILE, "--method", method)
    assert code == 0 and json.loads(out)["feasible"]


def test_solve_sgs(capsys, tmp_path):
    order = tmp_path / "w.json"
    write_json(order_to_json(ScheduleOrder.from_sequences({1: list(range(1, 9))})), order)
    code, out, _ = run(capsys, "solve", P0_FILE, "--method", "sgs", "--order", order)
    assert code == 0 and json.loads(out)["makespan"] == 3.2
    bad = tmp_path / "bad.json"
    write_json(order_to_json(ScheduleOrder.from_sequences({1: [4, 1, 2, 3, 5, 6, 7, 8]})), bad)
    code, _, err = run(capsys, "solve", P0_FILE, "--method", "sgs", "--order", bad)
    assert code == 1 and err


def test_solve_skip(capsys, tmp_path):
    scores = tmp_path / "s.json"
    write_json(scores_to_json(ScoreTable({a: 0.0 for a in P0.actions})), scores)
    code, out, _ = run(capsys, "solve", P0_FILE, "--method", "skip", "--scores", scores,
                       "--mode", "sample", "--seed", 3)
    doc = json.loads(out)
    assert code == 0 and doc["feasible"]
    assert sum(1 for s in doc["rollout"] if s != "skip") == 8
    _, again, _ = run(capsys, "solve", P0_FILE, "--method", "skip", "--scores", scores,
                      "--mode", "sample", "--seed", 3)
    assert again == out


def test_solve_figure(capsys, tmp_path):
    fig = tmp_path / "x.png"
    code, _, _ = run(capsys, "solve", P0_FILE, "--method", "list:cp:eft", "--figure", fig)
    assert code == 0 and fig.read_bytes()[:4] == b"\x89PNG"


def test_oracle(capsys, tmp_path):
    fig = tmp_path / "opt.png"
    code, out, _ = run(capsys, "oracle", P0_FILE, "--figure", fig)
    assert code == 0 and json.loads(out)["makespan"] == 3.2
    assert fig.exists()


@pytest.mark.parametrize("kind,gap", [("list", 0.8), ("sgs", 0), ("skip", 0)])
def test_gap(capsys, kind, gap):
    code, out, _ = run(capsys, "gap", "--map", kind, P0_FILE)
    assert code == 0 and json.loads(out)["gap"] == gap


def test_localsearch(capsys, tmp_path):
    code, out, _ = run(capsys, "localsearch", P0_FILE, "--steps", 20)
    doc = json.loads(out)
    assert code == 0 and doc["makespan"] == 3.2 and doc["initial_makespan"] == 4
    init = tmp_path / "x0.json"
    init.write_text(out)
    code, out, _ = run(capsys, "localsearch", P0_FILE, "--init", init)
    assert code == 0 and json.loads(out)["makespan"] == 3.2


def test_export_milp(capsys, tmp_path):
    code, out, _ = run(capsys, "export-milp", P0_FILE, "--mode", "hom")
    assert code == 0 and out.startswith("\\ homogeneous")
    path = tmp_path / "p0.lp"
    run(capsys, "export-milp", P0_FILE, "--mode", "hom", "--out", path)
    assert path.read_text() == out
    gen = tmp_path / "g.json"
    run(capsys, "gen", "--kind", "er", "--n", 5, "--seed", 1, "--out", gen)
    code, _, err = run(capsys, "export-milp", gen, "--mode", "hom")
    assert code == 1 and "homogeneous" in err


def test_gen_and_ldd(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, _, _ = run(capsys, "gen", "--kind", "layered", "--n", 12, "--seed", 2, "--profile", "tpch",
                     "--out", path)
    assert code == 0
    code, out, _ = run(capsys, "ldd", path)
    doc = json.loads(out)
    assert code == 0 and len(doc["matrix"]) == 12 and doc["dmax"] == 500
    code, out, _ = run(capsys, "ldd", P0_FILE, "--format", "csv", "--dmax", 10)
    rows = out.strip().splitlines()
    assert rows[0] == "task,1,2,3,4,5,6,7,8"
    assert rows[1].split(",")[8] == "-10"


def test_bench(capsys, tmp_path):
    inst_dir = tmp_path / "inst"
    inst_dir.mkdir()
    write_json(instance_to_json(P0), inst_dir / "p0.json")
    figs = tmp_path / "figs"
    csv_path = tmp_path / "r.csv"
    argv = ["bench", "--instances", inst_dir, "--methods", "cp", "sgs-oracle", "skip-sample",
            "--samples", 4, "--seeds", 0, 1, "--csv", csv_path, "--figures", figs]
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0
    assert doc["summary"]["sgs-oracle"]["improvement"] == pytest.approx(20.0)
    assert csv_path.read_text().startswith("instance,method,makespan")
    assert (figs / "makespan.png").exists() and (figs / "improvement.png").exists()
    _, again, _ = run(capsys, *argv)
    assert again == out


def test_bench_unknown_method(capsys):
    code, _, err = run(capsys, "bench", "--instances", P0_FILE, "--methods", "magic")
    assert code == 1 and "magic" in err


def test_io_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "oracle", tmp_path / "missing.json")
    assert code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(capsys, "oracle", broken)[0] == 2
    odd = tmp_path / "odd.json"
    odd.write_text('{"tasks": 3}')
    assert run(capsys, "validate", odd)[0] == 2


def test_unknown_solve_method(capsys):
    assert run(capsys, "solve", P0_FILE, "--method", "list:cp:nope")[0] == 1
    assert run(capsys, "solve", P0_FILE, "--method", "magic")[0] == 1


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code != 0


@pytest.mark.parametrize("argv", [
    ["oracle", P0_FILE], ["gap", "--map", "skip", P0_FILE], ["export-milp", P0_FILE],
    ["gen", "--kind", "sbm", "--n", "20", "--seed", "5"], ["ldd", P0_FILE],
    ["solve", P0_FILE, "--method", "skip", "--mode", "sample", "--seed", "9"],
])
def test_byte_identical_subprocess(argv):
    cmd = [sys.executable, "-m", "dagsched", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
