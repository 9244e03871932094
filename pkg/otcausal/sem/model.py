"""Structural equation models and ancestral sampling."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from ..errors import ConfigError, GenerationError
from ..graph import Dag, compatible_ordering
from .expr import Mechanism
from .noise import NoiseSpec

logger = logging.getLogger(__name__)


class ModelClass(str, Enum):
    """How a node's noise enters its equation."""

    GENERAL = "general"  # X = f(parents, U)
    ANM = "anm"  # X = g(parents) + U
    PNL = "pnl"  # X = post(g(parents) + U)


@dataclass(frozen=True)
class NodeAssignment:
    """Equation of one node.

    Attributes:
        mechanism: ``f`` (general) or the additive part ``g`` (ANM, PNL)
        noise: Distribution of the node's noise ``U``
        post: Invertible post-map in ``V`` (PNL only)
    """

    mechanism: Mechanism
    noise: NoiseSpec
    post: Mechanism | None = None

    @classmethod
    def of(cls, mechanism: str, noise: NoiseSpec, post: str | None = None) -> NodeAssignment:
        return cls(Mechanism.parse(mechanism), noise, Mechanism.parse(post) if post is not None else None)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"mechanism": self.mechanism.source, "noise": self.noise.to_dict()}
        if self.post is not None:
            data["post"] = self.post.source
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> NodeAssignment:
        try:
            return cls.of(data["mechanism"], NoiseSpec.from_dict(data["noise"]), data.get("post"))
        except KeyError as e:
            raise ConfigError(f"node assignment is missing {e}") from e


@dataclass(frozen=True)
class SemSpec:
    """A structural equation model over ``X1..Xd``.

    Raises:
        ConfigError: If an equation references a non-parent or does not fit
            the model class
    """

    dag: Dag
    nodes: tuple[NodeAssignment, ...]
    kind: ModelClass = ModelClass.ANM
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModelClass(self.kind))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"X{i + 1}" for i in range(self.dag.d)))
        if len(self.nodes) != self.dag.d or len(self.names) != self.dag.d:
            raise ConfigError(f"model has {self.dag.d} variables but {len(self.nodes)} equations")
        for k, node in enumerate(self.nodes):
            self._check_node(k, node)

    def _check_node(self, k: int, node: NodeAssignment) -> None:
        parents = self.dag.parents(k)
        used = node.mechanism.variables()
        if not used <= parents:
            extra = sorted(v + 1 for v in used - parents)
            raise ConfigError(f"equation of X{k + 1} references non-parents {extra}")
        if used != parents:
            logger.warning("equation of X%d ignores parents %s", k + 1, sorted(v + 1 for v in parents - used))
        if node.mechanism.uses_core():
            raise ConfigError(f"equation of X{k + 1} may not reference V")
        if self.kind is ModelClass.GENERAL:
            if node.post is not None:
                raise ConfigError("post-maps are only allowed in PNL models")
            return
        if node.mechanism.uses_noise():
            raise ConfigError(f"{self.kind.value.upper()} equation of X{k + 1} must not reference U")
        if self.kind is ModelClass.ANM and node.post is not None:
            raise ConfigError("post-maps are only allowed in PNL models")
        if self.kind is ModelClass.PNL:
            if node.post is None:
                raise ConfigError(f"PNL equation of X{k + 1} needs a post-map")
            if node.post.names() - {"V"}:
                raise ConfigError(f"post-map of X{k + 1} may only reference V")

    @property
    def d(self) -> int:
        return self.dag.d

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": self.d,
            "kind": self.kind.value,
            "names": list(self.names),
            "edges": [[u + 1, v + 1] for u, v in sorted(self.dag.edges)],
            "equations": [node.to_dict() for node in self.nodes],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SemSpec:
        try:
            d = int(data["nodes"])
            dag = Dag(d, frozenset((u - 1, v - 1) for u, v in data.get("edges", [])))
            nodes = tuple(NodeAssignment.from_dict(e) for e in data["equations"])
            return cls(dag, nodes, ModelClass(data.get("kind", "anm")), tuple(data.get("names", ())))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed model specification: {e}") from e


def _evaluate_node(spec: SemSpec, k: int, values: np.ndarray, noise: np.ndarray) -> np.ndarray:
    node = spec.nodes[k]
    n = values.shape[0]
    env: dict[str, np.ndarray] = {f"X{p + 1}": values[:, p] for p in spec.dag.parents(k)}
    env["U"] = noise
    core = np.broadcast_to(node.mechanism.evaluate(env), (n,))
    if spec.kind is ModelClass.GENERAL:
        return np.array(core, dtype=float)
    core = core + noise
    if spec.kind is ModelClass.PNL and node.post is not None:
        return np.array(np.broadcast_to(node.post.evaluate({"V": core}), (n,)), dtype=float)
    return np.array(core, dtype=float)


def sample(spec: SemSpec, n: int, seed: int = 0, return_noise: bool = False):
    """Ancestral sampling of ``n`` rows.

    Nodes are visited in topological order; node ``k`` draws its noise from
    the ``k``-th child of ``SeedSequence(seed)`` so a node's noise does not
    depend on the visiting order.

    Returns:
        The ``(n, d)`` sample matrix, and the noise matrix with ``return_noise``

    Raises:
        GenerationError: If a node produces a non-finite value
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = spec.d
    rngs = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(d)]
    values = np.zeros((n, d))
    noises = np.zeros((n, d))
    for k in compatible_ordering(spec.dag):
        try:
            noises[:, k] = spec.nodes[k].noise.sample(n, rngs[k])
        except ValueError as e:
            raise GenerationError(node=k, message=f"noise sampling failed ({e})") from e
        column = _evaluate_node(spec, k, values, noises[:, k])
        bad = np.flatnonzero(~np.isfinite(column))
        if bad.size:
            raise GenerationError(node=k, message=f"non-finite value in sample {bad[0]}")
        values[:, k] = column
    logger.debug("Sampled %d rows from a %d-variable %s model", n, d, spec.kind.value)
    return (values, noises) if return_noise else values

