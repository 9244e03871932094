"""Edge orientation: v-structures from separating sets and Meek's rules."""

from __future__ import annotations

import logging
from itertools import combinations

from .types import Dag, Edge, Pdag, SepSetTable, edge_key

logger = logging.getLogger(__name__)


def orient_v_structures(skeleton: Pdag, sepsets: SepSetTable) -> Pdag:
    """Orient unshielded colliders ``k -> l <- m`` where ``l`` is not in ``sep(k, m)``.

    Edges demanded in both directions stay undirected and are marked
    conflicted. A nonadjacent pair without a recorded separating set is
    treated as separated by the empty set.
    """
    if skeleton.directed:
        raise ValueError("orient_v_structures expects an undirected skeleton")
    demands: set[Edge] = set()
    for ell in range(skeleton.d):
        for k, m in combinations(sorted(skeleton.neighbors(ell)), 2):
            if skeleton.adjacent(k, m):
                continue
            sep = sepsets.get(k, m)
            if sep is None:
                logger.debug("no separating set for (%d, %d), using the empty set", k + 1, m + 1)
                sep = ()
            if ell not in sep:
                demands.add((k, ell))
                demands.add((m, ell))

    conflicted = {edge_key(u, v) for u, v in demands if (v, u) in demands}
    directed = {(u, v) for u, v in demands if edge_key(u, v) not in conflicted}
    undirected = skeleton.undirected - {edge_key(u, v) for u, v in directed}
    if conflicted:
        logger.info(
            "conflicting v-structure orientations on %s",
            ", ".join(f"{u + 1}-{v + 1}" for u, v in sorted(conflicted)),
        )
    return Pdag(skeleton.d, directed=frozenset(directed), undirected=undirected, conflicted=frozenset(conflicted))


class _Closure:
    def __init__(self, pdag: Pdag) -> None:
        self.d = pdag.d
        self.directed = set(pdag.directed)
        self.undirected = set(pdag.undirected)
        self.conflicted = set(pdag.conflicted)

    def adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.directed or (b, a) in self.directed or edge_key(a, b) in self.undirected

    def is_undirected(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.undirected

    def implied(self, a: int, b: int) -> str | None:
        """Name of the first rule forcing ``a -> b``, if any."""
        others = [c for c in range(self.d) if c not in (a, b)]
        # R1: c -> a - b, c and b nonadjacent
        for c in others:
            if (c, a) in self.directed and not self.adjacent(c, b):
                return "R1"
        # R2: a -> c -> b
        for c in others:
            if (a, c) in self.directed and (c, b) in self.directed:
                return "R2"
        # R3: a - c -> b, a - e -> b, c and e nonadjacent
        for c, e in combinations(others, 2):
            if (
                self.is_undirected(a, c)
                and self.is_undirected(a, e)
                and (c, b) in self.directed
                and (e, b) in self.directed
                and not self.adjacent(c, e)
            ):
                return "R3"
        # R4: a - c -> e -> b, c and b nonadjacent, a and e adjacent
        for c in others:
            if not self.is_undirected(a, c) or self.adjacent(c, b):
                continue
            for e in others:
                if e != c and (c, e) in self.directed and (e, b) in self.directed and self.adjacent(a, e):
                    return "R4"
        return None

    def run(self) -> None:
        changed = True
        while changed:
            changed = False
            for a, b in sorted(self.undirected - self.conflicted):
                for u, v in ((a, b), (b, a)):
                    rule = self.implied(u, v)
                    if rule is not None:
                        logger.debug("%s orients %d -> %d", rule, u + 1, v + 1)
                        self.undirected.discard((a, b))
                        self.directed.add((u, v))
                        changed = True
                        break

    def result(self) -> Pdag:
        return Pdag(
            self.d,
            directed=frozenset(self.directed),
            undirected=frozenset(self.undirected),
            conflicted=frozenset(self.conflicted),
        )


def meek_closure(pdag: Pdag) -> Pdag:
    """Apply Meek's rules R1-R4 until no undirected edge can be oriented.

    Conflicted edges are never oriented. The result is a fixed point, so the
    operation is idempotent.
    """
    closure = _Closure(pdag)
    closure.run()
    return closure.result()


def essential_graph(dag: Dag) -> Pdag:
    """The CPDAG of ``dag``: v-structure edges directed, then Meek-closed."""
    compelled = set()
    for a, c, b in dag.v_structures():
        compelled.add((a, c))
        compelled.add((b, c))
    undirected = frozenset(edge_key(u, v) for u, v in dag.edges if (u, v) not in compelled)
    return meek_closure(Pdag(dag.d, directed=frozenset(compelled), undirected=undirected))
