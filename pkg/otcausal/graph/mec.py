"""Markov equivalence classes: enumeration and compatible orderings."""

from __future__ import annotations

import logging

import networkx as nx

from .types import Dag, Edge, Ordering, Pdag

logger = logging.getLogger(__name__)


def _reaches(directed: set[Edge], source: int, target: int) -> bool:
    stack = [source]
    seen = {source}
    while stack:
        v = stack.pop()
        if v == target:
            return True
        for a, b in directed:
            if a == v and b not in seen:
                seen.add(b)
                stack.append(b)
    return False


def enumerate_mec(cpdag: Pdag) -> list[Dag]:
    """All DAGs obtained by orienting the undirected edges of ``cpdag``.

    A member keeps every directed edge, stays acyclic and has no
    v-structure beyond those already present in ``cpdag``. Members are
    produced in a fixed order: undirected edges are visited in sorted order
    and ``u -> v`` with ``u < v`` is tried first. Conflicted edges are
    oriented like any other undirected edge.

    Returns:
        The members; empty when ``cpdag`` has no consistent extension
    """
    pending = sorted(cpdag.undirected)
    skeleton = cpdag.skeleton()

    def adjacent(a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in skeleton

    members: list[Dag] = []
    directed = set(cpdag.directed)

    def creates_v_structure(u: int, v: int) -> bool:
        return any(w != u and b == v and not adjacent(w, u) for w, b in directed)

    def extend(i: int) -> None:
        if i == len(pending):
            members.append(Dag(cpdag.d, frozenset(directed)))
            return
        a, b = pending[i]
        for u, v in ((a, b), (b, a)):
            if _reaches(directed, v, u) or creates_v_structure(u, v):
                continue
            directed.add((u, v))
            extend(i + 1)
            directed.discard((u, v))

    if nx.is_directed_acyclic_graph(nx.DiGraph(list(directed))):
        extend(0)
    if not members:
        logger.warning("partially directed graph has no consistent DAG extension")
    return members


def compatible_ordering(dag: Dag) -> Ordering:
    """The topological ordering of ``dag`` taking the smallest ready vertex first."""
    return Ordering(tuple(nx.lexicographical_topological_sort(dag.to_networkx())))


def possible_orderings(cpdag: Pdag) -> list[Ordering]:
    """One compatible ordering per member of the equivalence class, sorted and deduplicated."""
    return sorted({compatible_ordering(member) for member in enumerate_mec(cpdag)})


def dag_from_ordering(skeleton: Pdag, ordering: Ordering) -> Dag:
    """Orient every edge of ``skeleton`` along ``ordering``."""
    return Dag.from_ordering(skeleton.skeleton(), ordering.order, skeleton.d)
