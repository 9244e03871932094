"""Tests for graph text forms."""

import json

import pytest

from otcausal.errors import InconsistentGraphError
from otcausal.graph import (
    Dag,
    Pdag,
    from_json,
    ordering_from_string,
    parse_edges,
    serialize_graph,
    to_dot,
    to_json,
)


def test_parse_edges_accepts_separators():
    dag = parse_edges("1->2, 2→3;1->3\n")
    assert dag.edges == {(0, 1), (1, 2), (0, 2)}
    assert parse_edges("1->2", d=4).d == 4
    assert parse_edges("").d == 0


@pytest.mark.parametrize("text", ["1--2", "1-2", "a->b", "1->"])
def test_parse_edges_rejects_non_directed(text):
    with pytest.raises(InconsistentGraphError, match="cannot parse"):
        parse_edges(text)


def test_json_keeps_all_edge_kinds():
    pdag = Pdag(3, directed={(0, 1)}, undirected={(1, 2)}, conflicted={(1, 2)})
    text = to_json(pdag, labels=["a", "b", "c"], meta={"version": "x"})
    payload = json.loads(text)
    assert payload["kind"] == "pdag"
    assert payload["directed"] == [[1, 2]]
    assert payload["conflicted"] == [[2, 3]]
    assert payload["meta"] == {"version": "x"}
    assert from_json(text) == pdag


def test_dag_json():
    dag = parse_edges("2->1")
    restored = from_json(to_json(dag))
    assert isinstance(restored, Dag)
    assert restored == dag


def test_from_json_unwraps_nested_graph():
    dag = parse_edges("1->2")
    wrapped = json.dumps({"graph": serialize_graph(dag), "sepsets": {}})
    assert from_json(wrapped) == dag


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"directed": [[1, 2]]}),
        json.dumps({"kind": "dag", "nodes": 2, "undirected": [[1, 2]]}),
    ],
)
def test_from_json_errors(text):
    with pytest.raises(InconsistentGraphError):
        from_json(text)


def test_dot_rendering():
    pdag = Pdag(3, directed={(0, 1)}, undirected={(1, 2)}, conflicted={(1, 2)})
    dot = to_dot(pdag, labels=["A", "B", "C"], comment="otcausal 0.1.0 abc")
    lines = dot.splitlines()
    assert lines[0] == "// otcausal 0.1.0 abc"
    assert lines[1] == "digraph G {"
    assert '  "A" -> "B";' in lines
    assert '  "B" -> "C" [dir=none style=dashed color=red];' in lines
    assert dot.endswith("}\n")


def test_dot_default_labels():
    dot = to_dot(Pdag(2, undirected={(0, 1)}))
    assert '"X1" -> "X2" [dir=none];' in dot


def test_ordering_from_string():
    assert ordering_from_string("1→3→2").order == (0, 2, 1)
