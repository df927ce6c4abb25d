"""Tests for JSON serialisation, text tables and metric input."""

import json
import os
from fractions import Fraction

import numpy as np
import pytest

from liegraph.core.graphs import Graph, format_edge_list
from liegraph.core.linalg import Matrix
from liegraph.report import (
    atomic_write,
    dumps,
    format_matrix,
    format_report,
    graph_digest,
    parse_diag,
    parse_matrix_input,
    read_metric,
    to_jsonable,
    write_report,
)
from liegraph.exceptions import DimensionMismatchError, InvalidParameterError


class TestSerialize:
    def test_sorted_keys_and_newline(self):
        text = dumps({"b": 1, "a": {"d": 2, "c": 3}})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"c"') < text.index('"d"')

    def test_scalars(self):
        out = to_jsonable(
            {"half": Fraction(1, 2), "inf": float("inf"), "nan": np.float64("nan"),
             "pair": (1, 2), "arr": np.array([0.5, 1.0]), "n": np.int64(3)}
        )
        assert out == {"half": "1/2", "inf": "inf", "nan": "nan",
                       "pair": [1, 2], "arr": [0.5, 1.0], "n": 3}

    def test_shortest_float_repr(self):
        assert json.loads(dumps({"x": 0.1}))["x"] == 0.1
        assert '"x": 0.1\n' in dumps({"x": 0.1})

    def test_matrix_and_objects(self):
        m = Matrix.from_rows([[1, 0], [0, Fraction(2, 3)]])
        assert to_jsonable(m)["entries"] == [[0, 0, "1"], [1, 1, "2/3"]]
        with pytest.raises(TypeError):
            to_jsonable(object())

    def test_deterministic(self):
        report = {"z": [Fraction(1, 3), 2.5], "a": {"k": None, "b": True}}
        assert dumps(report) == dumps(dict(reversed(list(report.items()))))


class TestFiles:
    def test_atomic_write(self, tmp_path):
        path = tmp_path / "sub" / "report.json"
        atomic_write(str(path), "hello\n")
        assert path.read_text() == "hello\n"
        assert os.listdir(path.parent) == ["report.json"]

    def test_write_report(self, tmp_path):
        path = tmp_path / "r.json"
        text = write_report({"a": 1}, str(path))
        assert path.read_text() == text
        assert write_report({"a": 1}) == text

    def test_graph_digest(self, k3):
        digest = graph_digest(k3)
        assert digest.startswith("sha256:")
        assert len(digest) == len("sha256:") + 64
        same = Graph(3, ((2, 3), (1, 3), (1, 2)))
        assert graph_digest(same) == digest
        assert digest != graph_digest(Graph(3, ((1, 2),)))
        assert format_edge_list(k3).startswith("3\n")


class TestMetricInput:
    def test_parse_diag(self):
        metric = parse_diag("1, 1/2 ,3", 3)
        assert metric.exact
        assert metric.to_json() == {"diag": ["1", "1/2", "3"]}
        with pytest.raises(DimensionMismatchError):
            parse_diag("1,2", 3)
        with pytest.raises(InvalidParameterError):
            parse_diag("1,a,2", 3)

    def test_parse_matrix_input(self):
        m = parse_matrix_input("# gram\n2 1\n1, 2.5\n")
        assert m[1, 1] == Fraction(5, 2)
        assert m.shape == (2, 2)

    def test_read_json_metric(self, tmp_path):
        path = tmp_path / "metric.json"
        path.write_text(json.dumps({"diag": ["1", "2", "3"]}))
        assert read_metric(str(path), 3).to_json() == {"diag": ["1", "2", "3"]}

    def test_read_matrix_text(self, tmp_path):
        path = tmp_path / "metric.txt"
        path.write_text("2 1\n1 2\n")
        metric = read_metric(str(path), 2)
        assert metric.exact and not metric.is_diagonal
        with pytest.raises(DimensionMismatchError):
            read_metric(str(path), 3)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_metric(str(tmp_path / "none.json"), 2)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(json.JSONDecodeError):
            read_metric(str(path), 2)


class TestTables:
    def test_format_matrix(self):
        exact = format_matrix(Matrix.from_rows([[1, Fraction(-1, 2)], [0, 3]]), labels=["a", "b"])
        assert "-1/2" in exact
        assert exact.splitlines()[1].strip().startswith("a [")
        numeric = format_matrix(np.array([[1.0, 2.0]]), precision=2)
        assert "1.00" in numeric and "2.00" in numeric

    def test_format_report(self):
        table = format_report(
            {"algebra": {"dim": 7, "ricci": {"rows": 7, "cols": 7, "entries": [[0, 0, "1"]]}},
             "ok": True}
        )
        lines = table.splitlines()
        assert lines[0].startswith("algebra.dim")
        assert "7x7 matrix, 1 nonzero" in table
        assert lines[-1].split() == ["ok", "True"]
