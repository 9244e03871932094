"""Graph value types: DAGs, partially directed graphs, separating sets, orderings.

Vertices are ``0..d-1``. Undirected edges are stored as sorted pairs.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from ..errors import InconsistentGraphError

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _check_vertices(d: int, edges: Iterable[Edge]) -> None:
    for u, v in edges:
        if not (0 <= u < d and 0 <= v < d):
            raise InconsistentGraphError(f"edge ({u + 1}, {v + 1}) is out of range for {d} vertices")
        if u == v:
            raise InconsistentGraphError(f"self-loop at vertex {u + 1}")


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph on ``d`` vertices.

    Raises:
        InconsistentGraphError: On cycles, self-loops or out-of-range vertices
    """

    d: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset((int(u), int(v)) for u, v in self.edges))
        _check_vertices(self.d, self.edges)
        for u, v in self.edges:
            if (v, u) in self.edges:
                raise InconsistentGraphError(f"edge between {u + 1} and {v + 1} appears in both directions")
        if not nx.is_directed_acyclic_graph(self.to_networkx()):
            cycle = nx.find_cycle(self.to_networkx())
            raise InconsistentGraphError(
                "graph has a directed cycle: " + " -> ".join(str(u + 1) for u, _ in cycle)
            )

    @classmethod
    def from_edges(cls, d: int, edges: Iterable[Edge]) -> Dag:
        return cls(d, frozenset(edges))

    @classmethod
    def from_ordering(cls, skeleton: Iterable[Edge], ordering: Sequence[int], d: int | None = None) -> Dag:
        """Orient every skeleton edge from the earlier to the later vertex of ``ordering``."""
        position = {v: i for i, v in enumerate(ordering)}
        edges = frozenset((u, v) if position[u] < position[v] else (v, u) for u, v in skeleton)
        return cls(len(ordering) if d is None else d, edges)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.d))
        graph.add_edges_from(self.edges)
        return graph

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(u for u, w in self.edges if w == v)

    def children(self, v: int) -> frozenset[int]:
        return frozenset(w for u, w in self.edges if u == v)

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def skeleton(self) -> frozenset[Edge]:
        return frozenset(edge_key(u, v) for u, v in self.edges)

    def v_structures(self) -> frozenset[tuple[int, int, int]]:
        """Triples ``(a, c, b)`` with ``a -> c <- b``, ``a < b`` and ``a, b`` nonadjacent."""
        found = set()
        for c in range(self.d):
            for a, b in combinations(sorted(self.parents(c)), 2):
                if not self.adjacent(a, b):
                    found.add((a, c, b))
        return frozenset(found)


@dataclass(frozen=True)
class Pdag:
    """A partially directed graph.

    Attributes:
        d: Vertex count
        directed: Directed edges ``(u, v)`` meaning ``u -> v``
        undirected: Undirected edges as sorted pairs
        conflicted: Undirected edges whose orientation was demanded both ways
    """

    d: int
    directed: frozenset[Edge] = field(default_factory=frozenset)
    undirected: frozenset[Edge] = field(default_factory=frozenset)
    conflicted: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "directed", frozenset((int(u), int(v)) for u, v in self.directed))
        object.__setattr__(self, "undirected", frozenset(edge_key(int(u), int(v)) for u, v in self.undirected))
        object.__setattr__(self, "conflicted", frozenset(edge_key(int(u), int(v)) for u, v in self.conflicted))
        _check_vertices(self.d, self.directed | self.undirected)
        for u, v in self.directed:
            if (v, u) in self.directed:
                raise InconsistentGraphError(f"edge between {u + 1} and {v + 1} is directed both ways")
            if edge_key(u, v) in self.undirected:
                raise InconsistentGraphError(f"edge between {u + 1} and {v + 1} is both directed and undirected")
        if not self.conflicted <= self.undirected:
            raise InconsistentGraphError("conflicted edges must be undirected")

    @classmethod
    def complete(cls, d: int) -> Pdag:
        """The complete undirected graph."""
        return cls(d, undirected=frozenset(combinations(range(d), 2)))

    @classmethod
    def from_dag(cls, dag: Dag) -> Pdag:
        return cls(dag.d, directed=dag.edges)

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.directed or (v, u) in self.directed or edge_key(u, v) in self.undirected

    def adjacencies(self, v: int) -> frozenset[int]:
        out = {w for u, w in self.directed if u == v}
        out |= {u for u, w in self.directed if w == v}
        out |= {w for u, w in self.undirected if u == v}
        out |= {u for u, w in self.undirected if w == v}
        return frozenset(out)

    def neighbors(self, v: int) -> frozenset[int]:
        """Vertices joined to ``v`` by an undirected edge."""
        return frozenset({w for u, w in self.undirected if u == v} | {u for u, w in self.undirected if w == v})

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(u for u, w in self.directed if w == v)

    def children(self, v: int) -> frozenset[int]:
        return frozenset(w for u, w in self.directed if u == v)

    def skeleton(self) -> frozenset[Edge]:
        return frozenset(edge_key(u, v) for u, v in self.directed) | self.undirected

    def max_degree(self) -> int:
        return max((len(self.adjacencies(v)) for v in range(self.d)), default=0)

    def is_fully_directed(self) -> bool:
        return not self.undirected

    def edge_status(self, u: int, v: int) -> str | None:
        """``"->"``, ``"<-"``, ``"--"``, ``"conflict"`` for the pair ``(u, v)``, or ``None``."""
        if (u, v) in self.directed:
            return "->"
        if (v, u) in self.directed:
            return "<-"
        pair = edge_key(u, v)
        if pair in self.conflicted:
            return "conflict"
        if pair in self.undirected:
            return "--"
        return None

    def without_edge(self, u: int, v: int) -> Pdag:
        pair = edge_key(u, v)
        return Pdag(
            self.d,
            directed=self.directed - {(u, v), (v, u)},
            undirected=self.undirected - {pair},
            conflicted=self.conflicted - {pair},
        )


@dataclass(frozen=True)
class SepSetTable:
    """Separating sets recorded for removed edges, keyed by sorted pairs."""

    sets: Mapping[Edge, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized = {edge_key(u, v): tuple(sorted(s)) for (u, v), s in self.sets.items()}
        object.__setattr__(self, "sets", normalized)

    def get(self, u: int, v: int) -> tuple[int, ...] | None:
        return self.sets.get(edge_key(u, v))

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        return edge_key(*pair) in self.sets

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.sets))

    def __len__(self) -> int:
        return len(self.sets)

    def to_dict(self) -> dict[str, list[int]]:
        return {f"{u + 1},{v + 1}": [s + 1 for s in self.sets[(u, v)]] for u, v in sorted(self.sets)}


@dataclass(frozen=True, order=True)
class Ordering:
    """A permutation of ``0..d-1``; ``ordering[i]`` is the i-th vertex."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(v) for v in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"not a permutation: {[v + 1 for v in order]}")
        object.__setattr__(self, "order", order)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, i: int) -> int:
        return self.order[i]

    def position(self, v: int) -> int:
        return self.order.index(v)

    def label(self, sep: str = "→") -> str:
        """1-based rendering such as ``1→2→4``."""
        return sep.join(str(v + 1) for v in self.order)

    @classmethod
    def parse(cls, text: str) -> Ordering:
        """Parse ``"1→2→3"``, ``"1->2->3"`` or ``"1,2,3"`` (1-based)."""
        cleaned = text.replace("→", ",").replace("->", ",").replace(" ", ",")
        return cls(tuple(int(tok) - 1 for tok in cleaned.split(",") if tok))

    def is_compatible(self, dag: Dag) -> bool:
        position = {v: i for i, v in enumerate(self.order)}
        return all(position[u] < position[v] for u, v in dag.edges)
