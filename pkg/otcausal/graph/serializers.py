"""Text forms of graphs and orderings: JSON, DOT and 1-based edge strings."""

from __future__ import annotations

import json
import re
from typing import Any

from ..errors import InconsistentGraphError
from .types import Dag, Ordering, Pdag

_EDGE = re.compile(r"^(\d+)\s*(->|→|--|-)\s*(\d+)$")


def parse_edges(text: str, d: int | None = None) -> Dag:
    """Parse ``"1->3 2->3"`` (1-based, whitespace or comma separated) into a DAG.

    Without ``d`` the vertex count is the largest index mentioned.
    """
    edges = []
    for token in re.split(r"[\s,;]+", text.strip()):
        if not token:
            continue
        match = _EDGE.match(token)
        if match is None or match.group(2) in ("--", "-"):
            raise InconsistentGraphError(f"cannot parse directed edge {token!r}")
        edges.append((int(match.group(1)) - 1, int(match.group(3)) - 1))
    size = d if d is not None else max((max(u, v) + 1 for u, v in edges), default=0)
    return Dag(size, frozenset(edges))


def ordering_from_string(text: str) -> Ordering:
    """Parse a 1-based ordering such as ``"1→2→4→3"``."""
    return Ordering.parse(text)


def _edge_list(edges) -> list[list[int]]:
    return [[u + 1, v + 1] for u, v in sorted(edges)]


def serialize_graph(graph: Dag | Pdag, labels: list[str] | None = None) -> dict[str, Any]:
    """JSON-compatible form with 1-based vertices."""
    payload: dict[str, Any] = {"kind": "dag" if isinstance(graph, Dag) else "pdag", "nodes": graph.d}
    if labels is not None:
        payload["labels"] = list(labels)
    if isinstance(graph, Dag):
        payload["directed"] = _edge_list(graph.edges)
        payload["undirected"] = []
        payload["conflicted"] = []
    else:
        payload["directed"] = _edge_list(graph.directed)
        payload["undirected"] = _edge_list(graph.undirected)
        payload["conflicted"] = _edge_list(graph.conflicted)
    return payload


def deserialize_graph(payload: dict[str, Any]) -> Dag | Pdag:
    """Inverse of :func:`serialize_graph`.

    A ``pdag`` payload without undirected edges is still returned as a Pdag.
    """
    try:
        d = int(payload["nodes"])
        directed = frozenset((u - 1, v - 1) for u, v in payload.get("directed", []))
        undirected = frozenset((u - 1, v - 1) for u, v in payload.get("undirected", []))
        conflicted = frozenset((u - 1, v - 1) for u, v in payload.get("conflicted", []))
    except (KeyError, TypeError, ValueError) as e:
        raise InconsistentGraphError(f"malformed graph JSON: {e}") from e
    if payload.get("kind", "pdag") == "dag":
        if undirected:
            raise InconsistentGraphError("a dag cannot have undirected edges")
        return Dag(d, directed)
    return Pdag(d, directed=directed, undirected=undirected, conflicted=conflicted)


def to_json(graph: Dag | Pdag, labels: list[str] | None = None, meta: dict[str, Any] | None = None) -> str:
    payload = serialize_graph(graph, labels)
    if meta is not None:
        payload["meta"] = meta
    return json.dumps(payload, indent=2, ensure_ascii=False)


def from_json(text: str) -> Dag | Pdag:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InconsistentGraphError(f"malformed graph JSON: {e}") from e
    # experiment and pcot outputs nest the graph
    if "graph" in payload and "nodes" not in payload:
        payload = payload["graph"]
    return deserialize_graph(payload)


def to_dot(graph: Dag | Pdag, labels: list[str] | None = None, comment: str | None = None) -> str:
    """Graphviz rendering. Undirected edges have no arrowhead, conflicted ones are dashed red."""
    names = labels if labels is not None else [f"X{i + 1}" for i in range(graph.d)]
    lines = []
    if comment is not None:
        lines.append(f"// {comment}")
    lines.append("digraph G {")
    for name in names:
        lines.append(f'  "{name}";')
    directed = graph.edges if isinstance(graph, Dag) else graph.directed
    for u, v in sorted(directed):
        lines.append(f'  "{names[u]}" -> "{names[v]}";')
    if isinstance(graph, Pdag):
        for u, v in sorted(graph.undirected):
            style = ' style=dashed color=red' if (u, v) in graph.conflicted else ""
            lines.append(f'  "{names[u]}" -> "{names[v]}" [dir=none{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
