"""Repeated runs of one method on fresh data, collected into a result table.

A plan names a data source (a preset model sampled at size ``n`` or a CSV
file), a method and a number of repetitions. Repetition ``i`` uses the seed
``seed_base + i`` for both data generation and the method's own randomness.
Failing repetitions are recorded and the run continues.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Literal

import numpy as np

from ..ci import omega_report
from ..config import Settings, flatten_keys, load_settings
from ..discovery import run_pc_ot, select_ordering
from ..errors import ConfigError, OtCausalError
from ..graph import Dag, d_separated, essential_graph, parse_edges, structural_metrics
from ..parallel import map_ordered
from ..sem import SemSpec, preset, sample
from ..transport import TriangularMapSpec, fit_map
from .dataset import load_csv
from .results import ResultTable, fingerprint, read_json, write_json

logger = logging.getLogger(__name__)

Method = Literal["pcot", "anm", "pnl", "citest", "fit"]
METHODS = ("pcot", "anm", "pnl", "citest", "fit")


@dataclass(kw_only=True, frozen=True)
class ExperimentPlan:
    """What to run and where to write it.

    Exactly one of ``preset`` and ``csv`` names the data. With ``csv`` the
    file is read once; ``resample=True`` draws a bootstrap sample per
    repetition, otherwise every repetition sees the same rows.

    Attributes:
        method: ``pcot``, ``anm``, ``pnl``, ``citest`` or ``fit``
        preset: Preset model name, sampled with ``n`` rows per repetition
        preset_args: Keyword arguments of the preset factory
        csv: CSV file with a header row
        truth: True DAG as 1-based edge text (``"1->3 2->3"``) for CSV data
        subset: 1-based variables of the ``citest`` subset, default all
        gamma: Component weights of the ordering losses
        config: Nested settings overrides (``{"ci": {"delta": 3}}``)
        outputs: Output files by kind (``table``, ``summary``, ``json``)
        timing: Record wall time per repetition; off for byte-identical reruns
    """

    method: Method
    preset: str | None = None
    preset_args: Mapping[str, Any] = field(default_factory=dict)
    n: int | None = None
    csv: str | None = None
    log_transform: bool = False
    resample: bool = False
    truth: str | None = None
    subset: tuple[int, ...] | None = None
    gamma: float | tuple[float, ...] | None = None
    repetitions: int = 1
    seed_base: int = 0
    config: Mapping[str, Any] = field(default_factory=dict)
    outputs: Mapping[str, str] = field(default_factory=dict)
    timing: bool = True

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {list(METHODS)}")
        if (self.preset is None) == (self.csv is None):
            raise ConfigError("a plan needs exactly one data source: 'preset' or 'csv'")
        if self.preset is not None and (self.n is None or self.n < 2):
            raise ConfigError("a preset plan needs a sample size n >= 2")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.subset is not None and len(self.subset) < 2:
            raise ConfigError("a citest subset needs at least two variables")
        unknown = set(self.outputs) - {"table", "summary", "json"}
        if unknown:
            raise ConfigError(f"unknown output kinds {sorted(unknown)}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ExperimentPlan:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown plan keys {sorted(unknown)}", keys=sorted(unknown))
        values = dict(data)
        if values.get("subset") is not None:
            values["subset"] = tuple(int(v) for v in values["subset"])
        if isinstance(values.get("gamma"), list):
            values["gamma"] = tuple(float(g) for g in values["gamma"])
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(f"malformed experiment plan: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> ExperimentPlan:
        try:
            return cls.from_dict(read_json(path))
        except OtCausalError as e:
            raise ConfigError(f"cannot load plan {path}: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["preset_args"] = dict(self.preset_args)
        data["config"] = dict(self.config)
        data["outputs"] = dict(self.outputs)
        return data

    def with_outputs(self, out_dir: str | Path) -> ExperimentPlan:
        """Fill missing output paths with default names under ``out_dir``."""
        out = Path(out_dir)
        defaults = {
            "table": str(out / "results.csv"),
            "summary": str(out / "summary.csv"),
            "json": str(out / "results.json"),
        }
        return replace(self, outputs={**defaults, **self.outputs})


@dataclass
class ExperimentResult:
    table: ResultTable
    summary: ResultTable
    failures: int
    repetitions: int
    fingerprint: str

    @property
    def all_failed(self) -> bool:
        return self.failures == self.repetitions


@dataclass(frozen=True)
class _Data:
    values: np.ndarray | None
    spec: SemSpec | None
    truth: Dag | None


def _source(plan: ExperimentPlan) -> _Data:
    if plan.csv is not None:
        dataset = load_csv(plan.csv, log_transform=plan.log_transform)
        truth = parse_edges(plan.truth, d=dataset.d) if plan.truth else None
        return _Data(dataset.values, None, truth)
    spec = preset(plan.preset or "", **dict(plan.preset_args))
    return _Data(None, spec, spec.dag)


def _draw(plan: ExperimentPlan, source: _Data, seed: int) -> np.ndarray:
    if source.spec is not None:
        return sample(source.spec, plan.n or 0, seed=seed)
    assert source.values is not None
    if plan.resample:
        rng = np.random.default_rng(seed)
        return source.values[rng.integers(0, source.values.shape[0], source.values.shape[0])]
    return source.values


def _pcot_rows(x: np.ndarray, settings: Settings, truth: Dag | None) -> list[dict[str, Any]]:
    result = run_pc_ot(x, settings.pc_ot())
    row: dict[str, Any] = {
        "directed": len(result.cpdag.directed),
        "undirected": len(result.cpdag.undirected),
        "failed_subsets": result.trace.count("failed"),
    }
    if truth is not None:
        metrics = structural_metrics(result.cpdag, truth)
        row.update(metrics.to_dict())
        row["exact"] = int(metrics.overall == 0)
    return [row]


def _ordering_rows(
    x: np.ndarray, settings: Settings, truth: Dag | None, kind: str, gamma
) -> list[dict[str, Any]]:
    if truth is None:
        raise ConfigError("ordering methods need the true graph ('truth' for CSV data)")
    selection = select_ordering(essential_graph(truth), x, kind=kind, gamma=gamma, opts=settings.order_options())
    rows = []
    for rank, score in enumerate(selection.scores, start=1):
        row = score.to_row()
        row["rank"] = rank
        row["true_order"] = int(score.ordering.is_compatible(truth))
        rows.append(row)
    return rows


def _citest_rows(
    x: np.ndarray, settings: Settings, truth: Dag | None, subset: Sequence[int]
) -> list[dict[str, Any]]:
    seed_ci = replace(settings.ci, seed=settings.seed)
    report = omega_report(x, subset, replace(settings.fit, seed=settings.seed), seed_ci)
    rows = []
    for k, ell in report.pairs():
        a, b = report.position(k), report.position(ell)
        row: dict[str, Any] = {
            "x": k + 1,
            "y": ell + 1,
            "omega": float(report.omega[a, b]),
            "sigma": float(report.sigma[a, b]),
            "tau": float(report.tau[a, b]),
            "independent": int(report.independent(k, ell)),
        }
        if truth is not None:
            rest = [v for v in report.subset if v not in (k, ell)]
            truth_indep = d_separated(truth, k, ell, rest)
            row["truth_independent"] = int(truth_indep)
            row["correct"] = int(truth_indep == report.independent(k, ell))
        rows.append(row)
    return rows


def _fit_rows(x: np.ndarray, settings: Settings) -> list[dict[str, Any]]:
    spec = TriangularMapSpec.total_degree(x.shape[1], settings.fit.degree, settings.fit.quadrature_order)
    fitted = fit_map(spec, x, replace(settings.fit, seed=settings.seed))
    diag = fitted.diagnostics
    return [
        {
            "nll": diag.objective,
            "grad_norm": diag.grad_norm,
            "iterations": diag.iterations,
            "converged": int(diag.converged),
        }
    ]


def _non_finite(rows: Sequence[dict[str, Any]]) -> str | None:
    for i, row in enumerate(rows):
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                return f"non-finite {key!r} (value {value}) in row {i + 1}"
    return None


def _repetition(
    index: int, *, plan: ExperimentPlan, settings: Settings, source: _Data
) -> list[dict[str, Any]]:
    seed = plan.seed_base + index
    head: dict[str, Any] = {"repetition": index, "seed": seed}
    started = time.perf_counter()
    try:
        x = _draw(plan, source, seed)
        head["n"] = int(x.shape[0])
        run_settings = replace(settings, seed=seed)
        if plan.method == "pcot":
            rows = _pcot_rows(x, run_settings, source.truth)
        elif plan.method in ("anm", "pnl"):
            rows = _ordering_rows(x, run_settings, source.truth, plan.method, plan.gamma)
        elif plan.method == "citest":
            subset = [v - 1 for v in plan.subset] if plan.subset else list(range(x.shape[1]))
            rows = _citest_rows(x, run_settings, source.truth, subset)
        else:
            rows = _fit_rows(x, run_settings)
    except (OtCausalError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        logger.warning("Repetition %d (seed %d) failed: %s", index, seed, e)
        return [{**head, "status": "failed", "message": str(e)}]

    bad = _non_finite(rows)
    if bad is not None:
        logger.warning("Repetition %d (seed %d) failed: %s", index, seed, bad)
        return [{**head, "status": "failed", "message": bad}]

    elapsed = time.perf_counter() - started
    logger.info("Repetition %d (seed %d) done in %.2fs", index, seed, elapsed)
    out = []
    for row in rows:
        full = {**head, **row, "status": "ok"}
        if plan.timing:
            full["wall_time"] = elapsed
        out.append(full)
    return out


def _summary_keys(method: str) -> tuple[str, ...]:
    if method in ("anm", "pnl"):
        return ("ordering",)
    if method == "citest":
        return ("x", "y")
    return ()


def run_experiment(
    plan: ExperimentPlan,
    settings: Settings | None = None,
    *,
    write: bool = True,
) -> ExperimentResult:
    """Run every repetition of ``plan`` and write the configured outputs.

    Args:
        plan: The experiment plan
        settings: Base settings; ``plan.config`` is layered on top
        write: Write the files named in ``plan.outputs``

    Returns:
        Rows in repetition order, the summary table and the failure count
    """
    base = settings or Settings()
    if plan.config:
        overrides = {**flatten_keys(base.to_dict()), **flatten_keys(plan.config)}
        base = load_settings(env={}, overrides=overrides)

    source = _source(plan)
    plan_fp = fingerprint(plan.to_dict())
    logger.info("Running %s x%d (fingerprint %s)", plan.method, plan.repetitions, plan_fp[:12])

    run_one = partial(_repetition, plan=plan, settings=base, source=source)
    per_rep = map_ordered(run_one, range(plan.repetitions), base.workers)

    rows = [row for group in per_rep for row in group]
    failures = sum(1 for group in per_rep if group and group[0].get("status") == "failed")
    table = ResultTable(rows, fingerprint=plan_fp)
    table.check_finite()
    summary = ResultTable(table.summary(_summary_keys(plan.method)), fingerprint=plan_fp)

    if failures:
        logger.warning("%d of %d repetitions failed", failures, plan.repetitions)
    result = ExperimentResult(table, summary, failures, plan.repetitions, plan_fp)
    if write:
        write_outputs(plan, result)
    return result


def write_outputs(plan: ExperimentPlan, result: ExperimentResult) -> list[Path]:
    written = []
    outputs = plan.outputs
    for kind in ("table", "summary", "json"):
        if kind in outputs:
            Path(outputs[kind]).parent.mkdir(parents=True, exist_ok=True)
    if "table" in outputs:
        written.append(result.table.write_csv(outputs["table"]))
    if "summary" in outputs and result.summary.rows:
        written.append(result.summary.write_csv(outputs["summary"]))
    if "json" in outputs:
        payload = {
            "method": plan.method,
            "repetitions": plan.repetitions,
            "failures": result.failures,
            "rows": result.table.rows,
            "summary": result.summary.rows,
        }
        written.append(write_json(outputs["json"], payload, plan.to_dict()))
    return written
