"""PC-OT: constraint-based structure learning with the Ω independence test.

The search starts from the complete undirected graph. At level Δ every
subset Z of Δ + 2 variables that still contains an adjacent pair is tested
once; a pair ``(k, l)`` of Z declared independent loses its edge and gets
``Z \\ {k, l}`` as separating set. Levels advance until Δ exceeds the
maximum degree of the current graph. V-structures are then oriented from the
separating sets and Meek's rules close the result.

Subsets of one level are evaluated against the graph as it was when the
level started and merged in lexicographic order, so the output does not
depend on the worker count.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator
from dataclasses import dataclass, replace
from functools import partial
from itertools import combinations
from typing import Any, Protocol

import numpy as np

from ..ci import OmegaReport, omega_report
from ..config import PcOtConfig
from ..errors import DimensionError, OtCausalError
from ..graph import Dag, Pdag, SepSetTable, d_separated, meek_closure, orient_v_structures
from ..parallel import map_ordered
from ..transport import check_samples
from .trace import TraceEntry, TraceRecorder

logger = logging.getLogger(__name__)


class CiTester(Protocol):
    """Anything that turns a subset into pairwise independence decisions."""

    def __call__(self, samples: np.ndarray | None, subset: tuple[int, ...], level: int) -> OmegaReport: ...


class OmegaTester:
    """Decisions from the Ω score of a map fitted on the subset."""

    def __init__(self, config: PcOtConfig) -> None:
        self.config = config

    def __call__(self, samples: np.ndarray | None, subset: tuple[int, ...], level: int) -> OmegaReport:
        if samples is None:
            raise ValueError("the Ω tester needs samples")
        # one child seed per subset so random orders do not depend on scheduling
        seed = int(np.random.SeedSequence([self.config.seed, level, *subset]).generate_state(1)[0])
        ci = replace(self.config.ci, seed=seed)
        return omega_report(samples, subset, self.config.fit, ci)


class DSeparationOracle:
    """Exact decisions read off a known DAG by d-separation."""

    def __init__(self, dag: Dag) -> None:
        self.dag = dag

    @property
    def d(self) -> int:
        return self.dag.d

    def __call__(self, samples: np.ndarray | None, subset: tuple[int, ...], level: int) -> OmegaReport:
        size = len(subset)
        decisions = np.zeros((size, size), dtype=bool)
        for i, j in combinations(range(size), 2):
            given = [v for v in subset if v not in (subset[i], subset[j])]
            decisions[i, j] = decisions[j, i] = d_separated(self.dag, subset[i], subset[j], given)
        omega = np.where(decisions, 0.0, 1.0)
        np.fill_diagonal(omega, 0.0)
        tau = np.full((size, size), 0.5)
        np.fill_diagonal(tau, 0.0)
        return OmegaReport(
            subset=subset,
            omega=omega,
            sigma=np.zeros((size, size)),
            tau=tau,
            decisions=decisions,
            delta=1.0,
            threshold="oracle",
            orders=(subset,),
        )


@dataclass(frozen=True)
class PcOtResult:
    """Output of :func:`run_pc_ot`; unpacks as ``cpdag, sepsets, trace``."""

    cpdag: Pdag
    sepsets: SepSetTable
    trace: TraceRecorder
    skeleton: Pdag
    levels: int

    def __iter__(self) -> Iterator[Any]:
        return iter((self.cpdag, self.sepsets, self.trace))


def _evaluate(
    tester: CiTester, samples: np.ndarray | None, subset: tuple[int, ...], *, level: int
) -> tuple[OmegaReport | None, str | None, float]:
    started = time.perf_counter()
    try:
        report = tester(samples, subset, level)
    except OtCausalError as e:
        logger.warning("Skipping subset %s at level %d: %s", [v + 1 for v in subset], level, e)
        return None, str(e), time.perf_counter() - started
    return report, None, time.perf_counter() - started


def run_pc_ot(
    samples=None,
    config: PcOtConfig | None = None,
    *,
    tester: CiTester | None = None,
    dimension: int | None = None,
) -> PcOtResult:
    """Run PC-OT.

    Args:
        samples: Sample matrix ``(n, d)``; may be ``None`` with an oracle tester
        config: Run configuration
        tester: Override for the independence decisions, e.g. :class:`DSeparationOracle`
        dimension: Variable count when ``samples`` is ``None``

    Returns:
        The CPDAG, separating sets, trace, pre-orientation skeleton and the
        number of levels run

    Raises:
        DimensionError: If fewer than two variables are given
    """
    config = config or PcOtConfig()
    tester = tester or OmegaTester(config)
    x: np.ndarray | None = None
    if samples is not None:
        x = check_samples(samples)
        d = x.shape[1]
    elif dimension is not None:
        d = dimension
    elif isinstance(tester, DSeparationOracle):
        d = tester.d
    else:
        raise ValueError("run_pc_ot needs samples or a dimension")
    if d < 2:
        raise DimensionError(2, d, what="variable count")

    graph = Pdag.complete(d)
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}
    trace = TraceRecorder()
    level = 0
    parallel = config.workers > 1

    while level + 2 <= d and level <= graph.max_degree():
        if config.max_level is not None and level > config.max_level:
            logger.info("Stopping at the configured level cap %d", config.max_level)
            break
        start_graph = graph
        subsets = [
            z for z in combinations(range(d), level + 2)
            if any(start_graph.adjacent(k, ell) for k, ell in combinations(z, 2))
        ]
        logger.info("Level %d: %d subsets, %d edges", level, len(subsets), len(graph.skeleton()))

        if parallel:
            outcomes = map_ordered(partial(_evaluate, tester, x, level=level), subsets, config.workers)
        else:
            outcomes = []

        for i, subset in enumerate(subsets):
            if parallel:
                report, error, elapsed = outcomes[i]
            else:
                if not any(graph.adjacent(k, ell) for k, ell in combinations(subset, 2)):
                    trace.record(TraceEntry(level, subset, "skipped", message="no adjacent pair left"))
                    continue
                report, error, elapsed = _evaluate(tester, x, subset, level=level)

            if report is None:
                trace.record(TraceEntry(level, subset, "failed", message=error, elapsed=elapsed))
                continue

            deleted = []
            for k, ell in report.pairs():
                if graph.adjacent(k, ell) and report.independent(k, ell):
                    graph = graph.without_edge(k, ell)
                    sepsets[(k, ell)] = tuple(v for v in subset if v not in (k, ell))
                    deleted.append((k, ell))
                    logger.info(
                        "Removed %d-%d given %s (omega=%.4g)",
                        k + 1,
                        ell + 1,
                        [v + 1 for v in sepsets[(k, ell)]],
                        report.score(k, ell),
                    )
            trace.record(
                TraceEntry(
                    level,
                    subset,
                    "tested",
                    omega=report.omega.tolist(),
                    tau=report.tau.tolist(),
                    deleted=deleted,
                    elapsed=elapsed,
                )
            )
        level += 1

    table = SepSetTable(sepsets)
    skeleton = graph
    cpdag = meek_closure(orient_v_structures(skeleton, table))
    logger.info(
        "PC-OT finished after %d levels: %d directed, %d undirected edges",
        level,
        len(cpdag.directed),
        len(cpdag.undirected),
    )
    return PcOtResult(cpdag=cpdag, sepsets=table, trace=trace, skeleton=skeleton, levels=level)
