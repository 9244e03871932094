"""Tests for Dag, Pdag, SepSetTable and Ordering."""

import pytest

from otcausal.errors import InconsistentGraphError
from otcausal.graph import Dag, Ordering, Pdag, SepSetTable, parse_edges


def test_dag_rejects_cycles():
    with pytest.raises(InconsistentGraphError, match="directed cycle"):
        Dag(3, frozenset({(0, 1), (1, 2), (2, 0)}))


@pytest.mark.parametrize(
    "edges,message",
    [
        ({(0, 0)}, "self-loop"),
        ({(0, 3)}, "out of range"),
        ({(0, 1), (1, 0)}, "both directions"),
    ],
)
def test_dag_rejects_malformed_edges(edges, message):
    with pytest.raises(InconsistentGraphError, match=message):
        Dag(3, frozenset(edges))


def test_dag_accessors():
    dag = parse_edges("1->3 2->3 3->4")
    assert dag.d == 4
    assert dag.parents(2) == {0, 1}
    assert dag.children(2) == {3}
    assert dag.adjacent(3, 2)
    assert not dag.adjacent(0, 1)
    assert dag.skeleton() == {(0, 2), (1, 2), (2, 3)}
    assert dag.v_structures() == {(0, 2, 1)}


def test_shielded_collider_is_not_a_v_structure():
    dag = parse_edges("1->3 2->3 1->2")
    assert dag.v_structures() == frozenset()


def test_dag_from_ordering():
    dag = Dag.from_ordering({(0, 1), (1, 2)}, (2, 1, 0))
    assert dag.edges == {(2, 1), (1, 0)}


def test_pdag_complete_and_edge_status():
    pdag = Pdag.complete(4)
    assert len(pdag.undirected) == 6
    assert pdag.max_degree() == 3
    assert pdag.edge_status(2, 1) == "--"

    mixed = Pdag(3, directed={(0, 1)}, undirected={(2, 1)}, conflicted={(1, 2)})
    assert mixed.edge_status(0, 1) == "->"
    assert mixed.edge_status(1, 0) == "<-"
    assert mixed.edge_status(1, 2) == "conflict"
    assert mixed.edge_status(0, 2) is None
    assert mixed.neighbors(1) == {2}
    assert mixed.adjacencies(1) == {0, 2}
    assert not mixed.is_fully_directed()


def test_pdag_without_edge():
    pdag = Pdag(3, directed={(0, 1)}, undirected={(1, 2)}, conflicted={(1, 2)})
    smaller = pdag.without_edge(2, 1)
    assert smaller.undirected == frozenset()
    assert smaller.conflicted == frozenset()
    assert smaller.without_edge(1, 0).skeleton() == frozenset()


def test_pdag_invariants():
    with pytest.raises(InconsistentGraphError, match="both directed and undirected"):
        Pdag(2, directed={(0, 1)}, undirected={(0, 1)})
    with pytest.raises(InconsistentGraphError, match="conflicted edges"):
        Pdag(2, directed={(0, 1)}, conflicted={(0, 1)})


def test_pdag_from_dag():
    dag = parse_edges("1->2 2->3")
    pdag = Pdag.from_dag(dag)
    assert pdag.is_fully_directed()
    assert pdag.parents(1) == {0}


def test_sepset_table_normalizes_keys():
    table = SepSetTable({(3, 1): (2, 0)})
    assert table.get(1, 3) == (0, 2)
    assert (3, 1) in table
    assert (0, 1) not in table
    assert "x" not in table
    assert list(table) == [(1, 3)]
    assert len(table) == 1
    assert table.to_dict() == {"2,4": [1, 3]}


def test_ordering_basics():
    ordering = Ordering.parse("2→1→3")
    assert ordering.order == (1, 0, 2)
    assert ordering.label() == "2→1→3"
    assert ordering.label("->") == "2->1->3"
    assert ordering.position(2) == 2
    assert list(ordering) == [1, 0, 2]
    assert len(ordering) == 3
    assert Ordering.parse("2->1->3") == Ordering.parse("2,1,3") == ordering
    assert Ordering((0, 1, 2)) < ordering


def test_ordering_rejects_non_permutation():
    with pytest.raises(ValueError, match="not a permutation"):
        Ordering((0, 0, 1))


def test_ordering_compatibility():
    dag = parse_edges("1->2 1->3")
    assert Ordering.parse("1,3,2").is_compatible(dag)
    assert not Ordering.parse("2,1,3").is_compatible(dag)
