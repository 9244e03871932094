"""Tests for equivalence-class enumeration and orderings."""

from otcausal.graph import (
    Ordering,
    Pdag,
    compatible_ordering,
    dag_from_ordering,
    enumerate_mec,
    essential_graph,
    parse_edges,
    possible_orderings,
)
from otcausal.sem import anm6, sachs_graph


def test_chain_of_three_has_three_members():
    cpdag = Pdag(3, undirected={(0, 1), (1, 2)})
    members = enumerate_mec(cpdag)
    assert len(members) == 3
    assert all(not member.v_structures() for member in members)


def test_enumeration_order_is_fixed():
    cpdag = Pdag(2, undirected={(0, 1)})
    assert [m.edges for m in enumerate_mec(cpdag)] == [{(0, 1)}, {(1, 0)}]


def test_anm6_class_has_four_members():
    truth = anm6().dag
    cpdag = essential_graph(truth)
    assert cpdag.directed == {(0, 4), (3, 4), (2, 5), (4, 5)}
    members = enumerate_mec(cpdag)
    assert len(members) == 4
    assert truth in members
    assert len(possible_orderings(cpdag)) == 4


def test_sachs_class():
    cpdag = essential_graph(sachs_graph())
    members = enumerate_mec(cpdag)
    assert len(members) == 10
    assert len(set(members)) == 10
    orderings = possible_orderings(cpdag)
    assert len(orderings) == 10
    assert orderings == sorted(orderings)
    assert any(o.is_compatible(sachs_graph()) for o in orderings)


def test_no_consistent_extension():
    # 1 -> 2 - 3 <- 4: either orientation of 2 - 3 breaks the class
    cpdag = Pdag(4, directed={(0, 1), (3, 2)}, undirected={(1, 2)})
    assert enumerate_mec(cpdag) == []
    assert possible_orderings(cpdag) == []


def test_compatible_ordering_takes_smallest_ready_vertex():
    dag = parse_edges("3->1 3->2")
    assert compatible_ordering(dag) == Ordering((2, 0, 1))
    assert compatible_ordering(dag).is_compatible(dag)


def test_dag_from_ordering_orients_skeleton():
    cpdag = essential_graph(sachs_graph())
    dag = dag_from_ordering(cpdag, Ordering((4, 3, 2, 1, 0)))
    assert dag.skeleton() == cpdag.skeleton()
    assert all(u > v for u, v in dag.edges)
