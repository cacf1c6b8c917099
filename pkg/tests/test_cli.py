import csv
import json
import os
import subprocess
import sys

import pytest

from helpers import fps_tree
from mpmcs.bench import default_suite, load_suite
from mpmcs.cli import main, verify_solution
from mpmcs.core import FaultTree, load_tree, save_tree, tree_to_json
from mpmcs.encode import encode
from mpmcs.gen import GenConfig, composition, generate
from mpmcs.solve import decode, portfolio
from mpmcs.wcnf import emit_wcnf, read_wcnf


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def solved(tmp_path):
    tree = tmp_path / "t.json"
    assert run("generate", "--n", 40, "--r", "0.6,0.2,0.2", "--seed", 7, "-o", tree) == 0
    assert run("encode", tree, "-o", tmp_path / "t.wcnf") == 0
    assert run("solve", tmp_path / "t.wcnf", "--tree", tree, "-o", tmp_path / "t.sol.json") == 0
    return tmp_path


def test_generate_is_thin_wrapper(tmp_path):
    out = tmp_path / "a.json"
    assert run("generate", "--n", 60, "--r", "0.8,0.1,0.1", "--seed", 3, "--k", 2, "-o", out) == 0
    assert out.read_text() == tree_to_json(generate(GenConfig(60, 0.8, 0.1, 0.1, k=2, seed=3)))


def test_generate_twice_identical(tmp_path):
    for name in ("a", "b"):
        run("generate", "--n", 100, "--r", "0.6,0.2,0.2", "--seed", 5, "-o", tmp_path / name)
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_generate_from_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"n": 30, "r": [0.6, 0.2, 0.2], "seed": 4}')
    assert run("generate", "--config", cfg, "-o", tmp_path / "t.json") == 0
    assert load_tree(tmp_path / "t.json") == generate(GenConfig(30, 0.6, 0.2, 0.2, seed=4))


def test_encode_is_thin_wrapper(solved):
    tree = load_tree(solved / "t.json")
    inst, vm = encode(tree)
    assert read_wcnf(solved / "t.wcnf") == inst
    assert (solved / "t.wcnf").read_text().endswith(emit_wcnf(inst))
    assert json.loads((solved / "t.varmap.json").read_text())["shift"] == vm.shift


def test_solve_matches_library(solved):
    tree = load_tree(solved / "t.json")
    inst, vm = encode(tree)
    res = decode(portfolio(inst), vm, tree)
    doc = json.loads((solved / "t.sol.json").read_text())
    assert doc["status"] == "optimal"
    assert set(doc["events"]) == res.cut_set
    assert doc["intLogCost"] == res.int_log_cost


def test_verify_passes(solved, capsys):
    assert run("verify", solved / "t.json", solved / "t.sol.json") == 0
    out = capsys.readouterr().out
    assert "verification passed" in out and "FAIL" not in out


def test_verify_detects_tampering(solved, capsys):
    doc = json.loads((solved / "t.sol.json").read_text())
    tree = load_tree(solved / "t.json")
    broken = dict(doc, events=doc["events"][:-1], size=doc["size"] - 1)
    (solved / "bad.json").write_text(json.dumps(broken))
    assert run("verify", solved / "t.json", solved / "bad.json") == 3
    assert "FAIL cut-set" in capsys.readouterr().out
    extra = [e for e in tree.events if e not in doc["events"]][0]
    padded = dict(doc, events=doc["events"] + [extra], size=doc["size"] + 1)
    checks = {n: ok for n, ok, _ in verify_solution(tree, padded)}
    assert checks["cut-set"] and not checks["minimal"]


def test_verify_rejects_missing_solution():
    checks = verify_solution(fps_tree(), {"status": "unknown"})
    assert checks == [("has-solution", False, "status 'unknown'")]


def test_bad_ratios_exit_usage(tmp_path, capsys):
    assert run("generate", "--n", 10, "--r", "0.5,0.2,0.2", "-o", tmp_path / "x") == 1
    assert "ratios" in capsys.readouterr().err
    assert run("generate", "--n", 10, "--r", "0.8,0.2", "-o", tmp_path / "x") == 1


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.wcnf"
    bad.write_text("p wcnf 1 1 10\n5 1\n")
    assert run("solve", bad) == 2
    bad_tree = tmp_path / "bad.json"
    bad_tree.write_text("{nope")
    assert run("encode", bad_tree, "-o", tmp_path / "o.wcnf") == 2


def test_missing_file_exit(tmp_path):
    assert run("encode", tmp_path / "absent.json", "-o", tmp_path / "o.wcnf") == 1


def test_unknown_strategy_exit(solved):
    assert run("solve", solved / "t.wcnf", "--strategies", "nope") == 1


def test_budget_exit(tmp_path):
    tree = tmp_path / "big.json"
    run("generate", "--n", 2500, "--r", "0.8,0.1,0.1", "--seed", 1, "-o", tree)
    c = composition(load_tree(tree), include_root=False)
    assert (c.gAT, c.gAND, c.gOR) == (2000, 250, 250)
    run("encode", tree, "-o", tmp_path / "big.wcnf")
    code = run("solve", tmp_path / "big.wcnf", "--tree", tree, "--budget-ms", 1, "-o", tmp_path / "s.json")
    assert code == 4
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["status"] in ("feasible", "unknown")


def test_encode_idempotent_and_fps_header(tmp_path, capsys):
    save_tree(fps_tree(), tmp_path / "fps.json")
    for name in ("a.wcnf", "b.wcnf"):
        assert run("encode", tmp_path / "fps.json", "-o", tmp_path / name) == 0
    a = (tmp_path / "a.wcnf").read_text()
    assert a == (tmp_path / "b.wcnf").read_text()
    assert "p wcnf 12 24 2000000000\n" in a
    assert run("solve", tmp_path / "a.wcnf", "--tree", tmp_path / "fps.json", "-o", tmp_path / "s.json") == 0
    assert run("verify", tmp_path / "fps.json", tmp_path / "s.json") == 0
    assert "PASS oracle" in capsys.readouterr().out


def test_single_event_solve(tmp_path):
    save_tree(FaultTree.build(0, {1: 0.25}, {0: ("or", [1])}), tmp_path / "one.json")
    run("encode", tmp_path / "one.json", "-o", tmp_path / "one.wcnf")
    assert run("solve", tmp_path / "one.wcnf", "--tree", tmp_path / "one.json", "-o", tmp_path / "s.json") == 0
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["status"] == "optimal" and doc["size"] == 1 and doc["events"] == [1]


def test_infeasible_exits_zero(tmp_path, capsys):
    p = tmp_path / "inf.wcnf"
    p.write_text("p wcnf 1 3 100\n100 1 0\n100 -1 0\n3 1 0\n")
    assert run("solve", p) == 0
    assert "infeasible" in capsys.readouterr().out


def test_encode_clamp_warning_on_stderr(tmp_path):
    t = tmp_path / "t.json"
    t.write_text('{"version": 1, "top": 0, "nodes": [{"id": 0, "kind": "or", "inputs": [1, 2]},'
                 ' {"id": 1, "kind": "event", "p": 0}, {"id": 2, "kind": "event", "p": 0.5}]}')
    proc = subprocess.run([sys.executable, "-m", "mpmcs", "encode", str(t), "-o", str(tmp_path / "t.wcnf")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "clamped" in proc.stderr


def test_env_override(tmp_path):
    env = dict(os.environ, MPMCS_SEED="9")
    out = tmp_path / "t.json"
    proc = subprocess.run([sys.executable, "-m", "mpmcs", "generate", "--n", "30", "--r", "0.6,0.2,0.2",
                           "-o", str(out)], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert load_tree(out) == generate(GenConfig(30, 0.6, 0.2, 0.2, seed=9))


def test_pipeline(tmp_path, capsys):
    assert run("pipeline", "--n", 60, "--r", "0.8,0.1,0.1", "--seed", 2, "-o", tmp_path) == 0
    for suffix in (".json", ".wcnf", ".varmap.json", ".solution.json"):
        assert (tmp_path / ("tree" + suffix)).exists()
    assert "verification passed" in capsys.readouterr().out


def test_default_suite_layout():
    cases = default_suite()
    assert len(cases) == 80
    assert [c.id for c in cases] == list(range(1, 81))
    by_id = {c.id: c for c in cases}
    assert by_id[1].n == 2500 and by_id[1].config.r_at == 0.8
    assert by_id[15].n == 2500 and by_id[15].config.r_at == 0.6
    assert by_id[35].n == 5000 and by_id[35].config.r_at == 0.6
    assert by_id[80].n == 10000
    assert by_id[35].stem == "case-35-5000"


def test_load_suite():
    cases = load_suite('[{"id": 3, "n": 100, "r": [0.8, 0.1, 0.1], "seed": 11}]', scale=0.5)
    assert cases[0].n == 50 and cases[0].seed == 11


def test_bench_scaled(tmp_path):
    out = tmp_path / "bench"
    code = run("bench", "--scale", 0.01, "--jobs", 1, "--budget-ms", 10000, "-o", out)
    assert code == 0
    rows = list(csv.DictReader((out / "bench.csv").open()))
    assert len(rows) == 80
    assert {int(r["gNodes"]) - 1 for r in rows} == {25, 50, 75, 100}  # root counted
    assert all(r["status"] == "optimal" for r in rows)
    assert (out / "case-35-50.wcnf").exists()
    first = (out / "case-1-25.wcnf").read_bytes()
    again = tmp_path / "again"
    assert run("bench", "--scale", 0.01, "--cases", "1-3", "--jobs", 1, "-o", again) == 0
    assert (again / "case-1-25.wcnf").read_bytes() == first
    rows2 = list(csv.DictReader((again / "bench.csv").open()))
    for a, b in zip(rows[:3], rows2):
        assert (a["size"], a["intLogCost"]) == (b["size"], b["intLogCost"])


def test_save_and_load_tree(tmp_path):
    save_tree(fps_tree(), tmp_path / "f.json")
    assert load_tree(tmp_path / "f.json") == fps_tree()
