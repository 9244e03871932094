"""Result tables, provenance metadata and summary statistics.

Every file written here is stamped with a fingerprint of the plan (or CLI
arguments) that produced it, so a table can be traced back to its inputs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import duckdb
import pyarrow as pa
from pyarrow import csv as pacsv

from .._version import __version__
from ..errors import DataError

logger = logging.getLogger(__name__)

# Columns that identify a row rather than measure something
KEY_COLUMNS = ("repetition", "seed", "status", "message", "fingerprint")


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)


def fingerprint(plan: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON of ``plan`` together with the package version."""
    digest = hashlib.sha256(canonical_json({"plan": plan, "version": __version__}).encode("utf-8"))
    return digest.hexdigest()


def run_meta(plan: Mapping[str, Any]) -> dict[str, Any]:
    return {"version": __version__, "fingerprint": fingerprint(plan), "plan": dict(plan)}


def dot_comment(plan: Mapping[str, Any]) -> str:
    return f"otcausal {__version__} {fingerprint(plan)}"


def write_json(path: str | Path, payload: Mapping[str, Any], plan: Mapping[str, Any]) -> Path:
    """Write ``payload`` with a ``"meta"`` object describing its provenance."""
    path = Path(path)
    document = {**payload, "meta": run_meta(plan)}
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False, default=str) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def read_json(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read JSON file {path}: {e}") from e
    if not isinstance(data, dict):
        raise DataError(f"{path} must contain a JSON object")
    return data


@dataclass
class ResultTable:
    """Rows of an experiment or ordering table.

    Numeric cells must be finite; failed repetitions keep their row with
    ``status="failed"`` and empty measurements.
    """

    rows: list[dict[str, Any]] = field(default_factory=list)
    fingerprint: str | None = None

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def columns(self) -> list[str]:
        names: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in names:
                    names.append(key)
        return names

    def column(self, name: str) -> list[Any]:
        return [row.get(name) for row in self.rows]

    def metric_columns(self) -> list[str]:
        """Columns holding numeric measurements."""
        out = []
        for name in self.columns:
            if name in KEY_COLUMNS:
                continue
            values = [v for v in self.column(name) if v is not None]
            if values and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                out.append(name)
        return out

    def check_finite(self) -> None:
        """Final sanity check on a finished table.

        The experiment runner already turns repetitions with non-finite
        metrics into failed rows, so this only fires on tables built by hand.

        Raises:
            DataError: On the first non-finite float cell
        """
        for i, row in enumerate(self.rows):
            for key, value in row.items():
                if isinstance(value, float) and not math.isfinite(value):
                    raise DataError(f"row {i + 1} has a non-finite {key!r}")

    def to_arrow(self) -> pa.Table:
        columns = self.columns
        data = {name: self.column(name) for name in columns}
        if self.fingerprint is not None:
            data["fingerprint"] = [self.fingerprint] * len(self.rows)
        return pa.table(data)

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        pacsv.write_csv(self.to_arrow(), path)
        logger.info("Wrote %d rows to %s", len(self.rows), path)
        return path

    def summary(self, by: Sequence[str] = ()) -> list[dict[str, Any]]:
        """Per-metric mean, median, quartiles, min and max, optionally grouped.

        Failed rows are excluded. The result has one row per (group, metric).
        """
        return summarize(self, by)


def _quote(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def summarize(table: ResultTable, by: Sequence[str] = ()) -> list[dict[str, Any]]:
    metrics = [m for m in table.metric_columns() if m not in by]
    if not table.rows or not metrics:
        return []
    arrow = ResultTable(table.rows).to_arrow()
    group = ", ".join(_quote(b) for b in by)
    where = "WHERE status IS DISTINCT FROM 'failed'" if "status" in arrow.column_names else ""

    selects = []
    for metric in metrics:
        col = _quote(metric)
        keys = f"{group}, " if group else ""
        selects.append(
            f"SELECT {keys}'{metric}' AS metric, count({col}) AS count, avg({col}) AS mean, "
            f"median({col}) AS median, quantile_cont({col}, 0.25) AS q25, "
            f"quantile_cont({col}, 0.75) AS q75, min({col}) AS min, max({col}) AS max "
            f"FROM results {where}" + (f" GROUP BY {group}" if group else "")
        )
    order = f"{group}, metric" if group else "metric"
    query = " UNION ALL ".join(selects) + f" ORDER BY {order}"

    con = duckdb.connect()
    try:
        con.register("results", arrow)
        result = con.execute(query).fetch_arrow_table()
    finally:
        con.close()
    logger.debug("Summarized %d metrics over %d rows", len(metrics), len(table.rows))
    return result.to_pylist()
