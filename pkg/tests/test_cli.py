"""End-to-end tests for the command-line entry point."""

import json

import pytest

from liegraph.core.graphs import read_graph
from liegraph.exceptions import ConsistencyError
from main import EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, main

K3 = "3\n1 2\n1 3\n2 3\n"
P3 = "3\n1 2\n2 3\n"
K5 = "5\n" + "".join(f"{i} {j}\n" for i in range(1, 6) for j in range(i + 1, 6))


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    assert main(argv + ["--out", str(out)]) == EXIT_OK
    return json.loads(out.read_text()), out.read_bytes()


def test_gen(tmp_path):
    out = tmp_path / "k5.txt"
    assert main(["gen", "kn:5", "--out", str(out)]) == EXIT_OK
    g = read_graph(str(out))
    assert g.n == 5 and len(g.edges) == 10


def test_gen_stdout(capsys):
    assert main(["gen", "path:3"]) == EXIT_OK
    assert capsys.readouterr().out == P3


def test_analyze_k3(write, tmp_path):
    path = write("k3.txt", K3)
    report, first = run_json(["analyze", path], tmp_path, "a.json")
    _, second = run_json(["analyze", path], tmp_path, "b.json")
    assert first == second
    assert report["command"] == "analyze"
    assert report["input_digest"].startswith("sha256:")
    algebra = report["algebra"]
    assert algebra["dim"] == 7
    assert algebra["center_dim"] == 0
    assert algebra["jacobi"]["passed"] is True
    assert algebra["derived_dims"] == [7, 6, 3, 0]
    assert algebra["center_formula_matches"] is True


def test_analyze_stdout_and_pretty(write, capsys):
    assert main(["analyze", write("k3.txt", K3), "--pretty"]) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["algebra"]["dim"] == 7
    assert "algebra.dim" in captured.err


def test_analyze_char_two(write, tmp_path):
    report, _ = run_json(["analyze", write("k3.txt", K3), "--field", "f2"], tmp_path)
    algebra = report["algebra"]
    assert algebra["field"] == "f2"
    assert algebra["center_dim"] == 3
    assert "refused" in algebra["fingerprint"]
    assert algebra["warnings"]


def test_missing_file(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.txt")]) == EXIT_INPUT
    assert "not found" in capsys.readouterr().err


def test_malformed_file(write, capsys):
    path = write("bad.txt", "3\n1 2\n1 x\n")
    assert main(["analyze", path]) == EXIT_INPUT
    assert "line 3" in capsys.readouterr().err


def test_bad_diag_length(write):
    assert main(["metric", write("k3.txt", K3), "--diag", "1,1,1"]) == EXIT_INPUT


def test_metric_einstein(write, tmp_path):
    report, _ = run_json(
        ["metric", write("k3.txt", K3), "--diag", "1,1,1,1,1,1,6", "--trials", "2"], tmp_path
    )
    section = report["metric"]
    assert section["soliton"]["found"] is True
    assert section["soliton"]["c"] == "-5/2"
    assert section["iwasawa"]["passed"] is True
    assert section["split"]["passed"] is True
    assert section["hypothesis_every_vertex_in_clique"] is True
    assert section["warnings"] == []


def test_metric_on_a_path_warns(write, tmp_path):
    report, _ = run_json(["metric", write("p3.txt", P3), "--trials", "2"], tmp_path)
    section = report["metric"]
    assert section["hypothesis_every_vertex_in_clique"] is False
    assert section["warnings"]
    assert "refused" in section["split"]


def test_metric_file(write, tmp_path):
    metric = write("metric.json", json.dumps({"diag": [1, 1, 1, 1, 1, 1, 6]}))
    report, _ = run_json(
        ["metric", write("k3.txt", K3), "--metric", metric, "--trials", "1"], tmp_path
    )
    assert report["metric"]["soliton"]["found"] is True


def test_soliton_k3(write, tmp_path):
    report, _ = run_json(["soliton", write("k3.txt", K3)], tmp_path)
    section = report["soliton"]
    assert section["found"] is True
    assert section["c"] == "-5/2"
    assert section["nilsoliton"]["found"] is True


def test_soliton_refuses_pendant(write, capsys):
    path = write("pendant.txt", "4\n1 2\n1 3\n2 3\n3 4\n")
    assert main(["soliton", path]) == EXIT_INPUT
    assert "clique" in capsys.readouterr().err


def test_compare(write, tmp_path):
    a = write("a.txt", P3)
    b = write("b.txt", "3\n1 3\n2 3\n")
    report, _ = run_json(["compare", a, b], tmp_path)
    comparison = report["comparison"]
    assert comparison["graphs_isomorphic"] is True
    assert comparison["fingerprints_equal"] is True
    assert comparison["witness"] is not None


def test_compare_non_isomorphic(write, tmp_path):
    report, _ = run_json(["compare", write("a.txt", P3), write("b.txt", K3)], tmp_path)
    assert report["comparison"]["graphs_isomorphic"] is False
    assert report["comparison"]["witness"] is None


def test_compare_weighted_against_unweighted(write, tmp_path):
    a = write("a.txt", K3 + "w 1 2\n")
    report, _ = run_json(["compare", a, write("b.txt", K3)], tmp_path)
    comparison = report["comparison"]
    assert comparison["weighted"] is True
    assert comparison["graphs_isomorphic"] is False
    assert comparison["fingerprint_collision"] is False
    assert comparison["witness"] is None


def test_compare_weighted_relabeling(write, tmp_path):
    a = write("a.txt", K3 + "w 1 2\n")
    b = write("b.txt", K3 + "w 3 2\n")
    report, _ = run_json(["compare", a, b], tmp_path)
    comparison = report["comparison"]
    assert comparison["weighted"] is True
    assert comparison["graphs_isomorphic"] is True
    assert comparison["fingerprints_equal"] is True
    assert comparison["witness"] is not None


def test_consistency_error_exit_code(write, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise ConsistencyError("forced")

    monkeypatch.setattr("liegraph.cli.commands.compare_report", broken)
    assert main(["compare", write("a.txt", P3), write("b.txt", P3)]) == EXIT_INTERNAL
    assert "forced" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == "liegraph 1.0.0"


def test_gen_is_seeded(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["gen", "gnp:6:0.5", "--seed", "3", "--out", str(a)]) == EXIT_OK
    assert main(["gen", "gnp:6:0.5", "--seed", "3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_analyze_k5_and_path(write, tmp_path):
    k5, _ = run_json(
        ["analyze", write("k5.txt", K5), "--no-derivations"], tmp_path, "k5.json"
    )
    assert k5["algebra"]["center_dim"] == 5
    p3, _ = run_json(["analyze", write("p3.txt", P3)], tmp_path, "p3.json")
    assert p3["algebra"]["dim_U"] == 0
    assert p3["algebra"]["nilpotent"] is True


def test_metric_identity_k3(write, tmp_path):
    report, _ = run_json(["metric", write("k3.txt", K3), "--trials", "2"], tmp_path)
    section = report["metric"]
    assert section["ricci"]["diagonal"][6] == "-15"
    assert section["ricci"]["block_formula_matches"] is True
    assert section["iwasawa"]["passed"] is True
    assert section["stably_ricci_diagonal"]["passed"] is True
    assert section["soliton"]["found"] is False


def test_soliton_single_sweep(write, tmp_path):
    report, _ = run_json(["soliton", write("k3.txt", K3), "--iters", "1"], tmp_path)
    section = report["soliton"]
    assert section["found"] is False
    assert section["iterations"] == 1
    assert len(section["history"]["residual"]) == 1