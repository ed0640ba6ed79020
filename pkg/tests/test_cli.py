import json
import subprocess
import sys

import pytest

from conftest import EPS, expander_cnfs, theorem_instances
from hallspace.cli import main
from hallspace.cnf import dimacs_write
from hallspace.graphs import format_bipartite, format_hypergraph
from hallspace.matchings import minimal_counterexample


@pytest.fixture
def run(capsys):
    def call(*argv):
        try:
            code = main(list(argv))
        except SystemExit as exc:
            code = exc.code
        out, err = capsys.readouterr()
        return code, out, err
    return call


@pytest.fixture
def files(tmp_path):
    g, _ = theorem_instances(1, seed=11)[0]
    phi, _ = expander_cnfs(1)[0]
    paths = {
        "graph": tmp_path / "t.bip",
        "cnf": tmp_path / "e.cnf",
        "xnx": tmp_path / "xn.cnf",
        "sat": tmp_path / "sat.cnf",
        "hyp": tmp_path / "mc.hyp",
    }
    paths["graph"].write_text(format_bipartite(g))
    paths["cnf"].write_text(dimacs_write(phi))
    paths["xnx"].write_text("p cnf 1 2\n1 0\n-1 0\n")
    paths["sat"].write_text("p cnf 2 1\n1 2 0\n")
    paths["hyp"].write_text(format_hypergraph(minimal_counterexample()))
    return {k: str(v) for k, v in paths.items()}


def test_gen_cnf_is_deterministic(run):
    first = run("gen-cnf", "-n", "50", "-delta", "3", "-seed", "7")
    second = run("gen-cnf", "-n", "50", "-delta", "3", "-seed", "7")
    assert first[0] == 0 and first[1] == second[1]
    assert first[1].startswith("c hallspace gen-cnf") and "p cnf 50 150" in first[1]


def test_usage_errors(run):
    code, _, err = run("gen-cnf", "-n", "50", "-delta", "3")
    assert code == 2 and "-seed" in err
    code, _, err = run("gen-cnf", "-n", "50", "-delta", "0.5", "-seed", "1")
    assert code == 2 and "p/q" in err
    assert run("no-such-command")[0] == 2
    assert run("check-expansion", "-graph", "/nonexistent", "-s", "2", "-delta", "2")[0] == 2


def test_graph_commands(run, files, tmp_path):
    code, out, _ = run("check-expansion", "-graph", files["graph"], "-s", "4", "-delta", str(2 - EPS / 2))
    assert code == 0 and out == "certified\n"
    twins = tmp_path / "twins.bip"
    twins.write_text("bip 2 2\n0 1\n0 1\n")
    code, out, _ = run("check-expansion", "-graph", str(twins), "-s", "2", "-delta", "3/2", "-json")
    assert code == 1 and json.loads(out)["violation"] == [0, 1]
    code, out, _ = run("find-matching", "-graph", files["graph"], "-json")
    assert code == 0 and json.loads(out)["valid"]
    assert run("find-matching", "-graph", files["graph"], "-hk", "2")[0] == 2


def test_adj_graph_and_two_path_cover(run, files):
    code, out, _ = run("adj-graph", "-cnf", files["xnx"])
    assert code == 0 and "bip 2 1" in out
    code, out, _ = run("two-path-cover", "-hypergraph", files["hyp"])
    assert code == 1 and out == "none\n"
    code, out, _ = run("two-path-cover", "-hypergraph", files["hyp"], "-edges", "0,1,2")
    assert code == 0 and json.loads(out)


def test_counterexample_command(run, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = run("counterexample", "-epsilon", "5/12", "-certificate", str(cert))
    assert code == 0
    assert out.startswith("# counterexample epsilon=5/12: 16 vertices, 10 edges")
    assert json.loads(cert.read_text())["ok"]
    assert run("counterexample", "-epsilon", "1/3")[0] == 2


def test_verify_hall_reports_no_counterexamples(run):
    code, out, err = run("verify-hall", "-max-left", "3", "-max-right", "5", "-json")
    body = json.loads(out)
    assert code == 0 and body["ok"] and body["counterexamples"] == []
    assert "seconds" not in body and "sweep took" in err


def test_play_covergame(run, files, tmp_path):
    code, out, err = run("play-covergame", "-graph", files["graph"], "-adversary", "random", "-seed", "3", "-moves", "40")
    lines = out.splitlines()
    head = json.loads(lines[0])
    assert code == 0 and head["theorem_preconditions"] == "all hold"
    assert len(lines) > 2 and "invariant failures: 0" in err
    assert run("play-covergame", "-graph", files["graph"], "-adversary", "random")[0] == 2
    script = tmp_path / "moves.json"
    script.write_text(json.dumps([{"op": "challenge", "side": "left", "vertex": 0}]))
    assert run("play-covergame", "-graph", files["graph"], "-adversary", "script", "-script", str(script))[0] == 0


def test_strategy_commands(run, files):
    code, out, _ = run("verify-strategy", "-cnf", files["cnf"])
    assert code == 0 and out.startswith("k=2: ok")
    assert run("verify-strategy", "-cnf", files["cnf"], "-k", "3")[0] == 1
    assert run("free-family", "-cnf", files["cnf"])[0] == 0
    code, out, _ = run("build-strategy", "-cnf", files["cnf"])
    assert code == 0 and json.loads(out)["k"] == 2
    code, out, _ = run("bound-report", "-cnf", files["cnf"], "-mu", "8", "-json")
    body = json.loads(out)
    assert code == 0 and body["monomial_space_at_least"] == "2" and body["clauses_of_width_at_least"] == "7/2"
    code, out, _ = run("bound-report", "-cnf", files["cnf"], "-verify")
    assert code == 0 and "verified" in out
    assert run("bound-report", "-cnf", files["cnf"])[0] == 2


def test_refute_and_check_trace(run, files, tmp_path):
    code, out, _ = run("refute-naive", "-cnf", files["xnx"])
    assert code == 0
    trace = tmp_path / "x.trace"
    trace.write_text(out)
    code, out, _ = run("check-trace", "-trace", str(trace), "-cnf", files["xnx"])
    assert code == 0 and json.loads(out)["total_space"] == 2
    bad = trace.read_text().replace('"pivot": 1', '"pivot": 2')
    trace.write_text(bad)
    code, out, _ = run("check-trace", "-trace", str(trace), "-cnf", files["xnx"])
    assert code == 1 and out.startswith("violation at step 2: pivot missing")
    code, _, err = run("refute-naive", "-cnf", files["sat"])
    assert code == 1 and "no refutation" in err
    assert run("check-trace", "-trace", str(trace))[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hallspace", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "verify-hall" in out.stdout
