"""d-separation by reachability (Bayes-ball)."""

from __future__ import annotations

from collections.abc import Iterable

from .types import Dag


def _ancestors_of(dag: Dag, nodes: set[int]) -> set[int]:
    seen = set(nodes)
    stack = list(nodes)
    while stack:
        v = stack.pop()
        for p in dag.parents(v):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def reachable(dag: Dag, source: int, given: Iterable[int] = ()) -> set[int]:
    """Vertices connected to ``source`` by an active trail given ``given``."""
    z = set(given)
    anc = _ancestors_of(dag, z)
    visited: set[tuple[int, bool]] = set()
    # (vertex, arrived_from_child)
    stack: list[tuple[int, bool]] = [(source, True)]
    found: set[int] = set()
    while stack:
        v, up = stack.pop()
        if (v, up) in visited:
            continue
        visited.add((v, up))
        if v not in z:
            found.add(v)
        if up and v not in z:
            stack.extend((p, True) for p in dag.parents(v))
            stack.extend((c, False) for c in dag.children(v))
        elif not up:
            if v not in z:
                stack.extend((c, False) for c in dag.children(v))
            if v in anc:
                stack.extend((p, True) for p in dag.parents(v))
    found.discard(source)
    return found


def d_separated(dag: Dag, x: int, y: int, z: Iterable[int] = ()) -> bool:
    """Whether ``x`` and ``y`` are d-separated by ``z`` in ``dag``.

    Raises:
        ValueError: If a vertex is out of range, ``x == y``, or ``z`` contains ``x`` or ``y``
    """
    given = set(z)
    for v in (x, y, *given):
        if not 0 <= v < dag.d:
            raise ValueError(f"vertex {v + 1} is out of range for {dag.d} vertices")
    if x == y:
        raise ValueError("d-separation needs two distinct vertices")
    if x in given or y in given:
        raise ValueError("conditioning set must not contain the tested vertices")
    return y not in reachable(dag, x, given)
