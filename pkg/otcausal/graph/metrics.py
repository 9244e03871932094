"""Structural comparison of an estimated graph against the true DAG."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import DimensionError
from .orient import essential_graph
from .types import Dag, Pdag


@dataclass(frozen=True)
class StructuralMetrics:
    """Edge error counts.

    Attributes:
        missing: Skeleton edges of the truth absent from the estimate
        extra: Skeleton edges of the estimate absent from the truth
        misoriented: Shared edges whose mark differs from the true CPDAG;
            conflicted edges always count
    """

    missing: int
    extra: int
    misoriented: int

    @property
    def overall(self) -> int:
        return self.missing + self.extra + self.misoriented

    def to_dict(self) -> dict[str, int]:
        return {**asdict(self), "overall": self.overall}


def structural_metrics(estimate: Pdag, truth: Dag) -> StructuralMetrics:
    """Compare ``estimate`` with the CPDAG of ``truth``."""
    if estimate.d != truth.d:
        raise DimensionError(truth.d, estimate.d, what="estimated graph")
    reference = essential_graph(truth)
    est_skeleton = estimate.skeleton()
    true_skeleton = reference.skeleton()
    misoriented = sum(
        1
        for u, v in est_skeleton & true_skeleton
        if estimate.edge_status(u, v) == "conflict" or estimate.edge_status(u, v) != reference.edge_status(u, v)
    )
    return StructuralMetrics(
        missing=len(true_skeleton - est_skeleton),
        extra=len(est_skeleton - true_skeleton),
        misoriented=misoriented,
    )
