"""Tests for result tables, summaries and provenance."""

import json

import pytest

from otcausal import __version__
from otcausal.errors import DataError
from otcausal.io import (
    ResultTable,
    dot_comment,
    fingerprint,
    read_json,
    run_meta,
    summarize,
    write_json,
)


def test_fingerprint_is_canonical():
    assert fingerprint({"a": 1, "b": [1, 2]}) == fingerprint({"b": [1, 2], "a": 1})
    assert fingerprint({"a": 1}) != fingerprint({"a": 2})
    assert len(fingerprint({})) == 64


def test_meta_and_dot_comment():
    plan = {"method": "pcot"}
    meta = run_meta(plan)
    assert meta == {"version": __version__, "fingerprint": fingerprint(plan), "plan": plan}
    assert dot_comment(plan) == f"otcausal {__version__} {fingerprint(plan)}"


def test_json_round_trip(tmp_path):
    path = write_json(tmp_path / "out.json", {"value": 1.5}, {"method": "fit"})
    data = read_json(path)
    assert data["value"] == 1.5
    assert data["meta"]["plan"] == {"method": "fit"}


@pytest.mark.parametrize("text", ["{oops", "[1, 2]"])
def test_read_json_errors(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(DataError):
        read_json(path)


def test_read_json_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        read_json(tmp_path / "missing.json")


@pytest.fixture
def table():
    return ResultTable(
        [
            {"repetition": 0, "seed": 0, "ordering": "1→2", "total": 1.0, "rank": 1, "status": "ok"},
            {"repetition": 0, "seed": 0, "ordering": "2→1", "total": 4.0, "rank": 2, "status": "ok"},
            {"repetition": 1, "seed": 1, "ordering": "1→2", "total": 2.0, "rank": 1, "status": "ok"},
            {"repetition": 1, "seed": 1, "ordering": "2→1", "total": 3.0, "rank": 2, "status": "ok"},
            {"repetition": 2, "seed": 2, "status": "failed", "message": "boom"},
        ],
        fingerprint="abc",
    )


def test_columns(table):
    assert table.columns == ["repetition", "seed", "ordering", "total", "rank", "status", "message"]
    assert table.metric_columns() == ["total", "rank"]
    assert table.column("message") == [None, None, None, None, "boom"]
    assert len(table) == 5


def test_arrow_and_csv(table, tmp_path):
    arrow = table.to_arrow()
    assert arrow.column("fingerprint").to_pylist() == ["abc"] * 5
    path = table.write_csv(tmp_path / "results.csv")
    header = path.read_text().splitlines()[0]
    assert "fingerprint" in header


def test_check_finite():
    ResultTable([{"x": 1.0}]).check_finite()
    with pytest.raises(DataError, match="non-finite 'x'"):
        ResultTable([{"x": 1.0}, {"x": float("nan")}]).check_finite()


def test_summary_excludes_failed_rows(table):
    rows = {row["metric"]: row for row in summarize(table)}
    assert set(rows) == {"rank", "total"}
    total = rows["total"]
    assert total["count"] == 4
    assert total["mean"] == pytest.approx(2.5)
    assert total["median"] == pytest.approx(2.5)
    assert total["q25"] == pytest.approx(1.75)
    assert total["q75"] == pytest.approx(3.25)
    assert (total["min"], total["max"]) == (1.0, 4.0)


def test_grouped_summary(table):
    rows = table.summary(by=("ordering",))
    totals = {row["ordering"]: row for row in rows if row["metric"] == "total"}
    assert totals["1→2"]["mean"] == pytest.approx(1.5)
    assert totals["2→1"]["mean"] == pytest.approx(3.5)
    assert [(row["ordering"], row["metric"]) for row in rows] == [
        ("1→2", "rank"),
        ("1→2", "total"),
        ("2→1", "rank"),
        ("2→1", "total"),
    ]


def test_empty_summary():
    assert summarize(ResultTable()) == []
    assert summarize(ResultTable([{"status": "ok", "label": "a"}])) == []


def test_meta_survives_json_dump(tmp_path):
    path = write_json(tmp_path / "x.json", {"rows": [{"a": 1}]}, {"n": 3})
    assert json.loads(path.read_text())["meta"]["fingerprint"] == fingerprint({"n": 3})
