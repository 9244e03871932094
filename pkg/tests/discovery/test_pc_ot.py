"""Tests for PC-OT structure learning."""

import json

import numpy as np
import pytest

from otcausal.config import PcOtConfig
from otcausal.discovery import DSeparationOracle, run_pc_ot
from otcausal.errors import DimensionError, FitError
from otcausal.graph import essential_graph, parse_edges, structural_metrics
from otcausal.sem import pcot6, sample, vstruct3
from tests.helpers import gaussian_pair, random_dag


@pytest.mark.parametrize("seed", range(50))
def test_oracle_recovers_essential_graph(seed):
    """Test exact d-separation decisions give back the true CPDAG."""
    d = 3 + seed % 4
    dag = random_dag(d, 0.5, seed)
    result = run_pc_ot(tester=DSeparationOracle(dag))
    assert result.skeleton.skeleton() == dag.skeleton()
    assert result.cpdag == essential_graph(dag)
    assert not result.cpdag.conflicted


def test_oracle_sepsets_separate():
    dag = parse_edges("1->3 2->3 3->4")
    cpdag, sepsets, trace = run_pc_ot(tester=DSeparationOracle(dag))
    assert cpdag.directed == {(0, 2), (1, 2), (2, 3)}
    assert sepsets.get(0, 1) == ()
    assert sepsets.get(0, 3) == (2,)
    assert sepsets.get(1, 3) == (2,)
    assert len(trace) == trace.count("tested") + trace.count("skipped")


def test_workers_do_not_change_the_result():
    dag = random_dag(6, 0.5, 3)
    serial = run_pc_ot(tester=DSeparationOracle(dag), config=PcOtConfig(workers=1))
    parallel = run_pc_ot(tester=DSeparationOracle(dag), config=PcOtConfig(workers=4))
    assert serial.cpdag == parallel.cpdag
    assert serial.sepsets.to_dict() == parallel.sepsets.to_dict()
    assert serial.levels == parallel.levels


def test_level_cap_stops_early():
    # 1 and 3 are only separated by {2}
    dag = parse_edges("1->2 2->3")
    result = run_pc_ot(tester=DSeparationOracle(dag), config=PcOtConfig(max_level=0))
    assert result.skeleton.skeleton() == {(0, 1), (0, 2), (1, 2)}
    assert {e.level for e in result.trace.entries()} == {0}


class _FailingTester(DSeparationOracle):
    def __call__(self, samples, subset, level):
        if subset == (0, 2):
            raise FitError("map fit diverged", subset=subset)
        return super().__call__(samples, subset, level)


def test_failed_subset_keeps_its_edge():
    dag = parse_edges("1->2 3->2")
    result = run_pc_ot(tester=_FailingTester(dag))
    failed = [e for e in result.trace.entries() if e.status == "failed"]
    assert [e.subset for e in failed] == [(0, 2)]
    assert "map fit diverged" in failed[0].message
    assert result.skeleton.adjacent(0, 2)


def test_trace_serializes_one_based():
    dag = parse_edges("1->2")
    result = run_pc_ot(tester=DSeparationOracle(dag))
    lines = result.trace.to_jsonl().splitlines()
    assert len(lines) == 1
    entry = json.loads(lines[0])
    assert entry["subset"] == [1, 2]
    assert entry["status"] == "tested"
    assert entry["deleted"] == []


def test_trace_write(tmp_path):
    result = run_pc_ot(tester=DSeparationOracle(parse_edges("1->2 2->3")))
    path = tmp_path / "trace.jsonl"
    result.trace.write(path)
    assert path.read_text().count("\n") == len(result.trace)


def test_argument_errors():
    with pytest.raises(DimensionError):
        run_pc_ot(np.zeros((10, 1)))
    with pytest.raises(ValueError, match="needs samples"):
        run_pc_ot(tester=lambda samples, subset, level: None)


def test_dependent_pair_keeps_its_edge():
    result = run_pc_ot(gaussian_pair(0.8, 500, seed=3))
    assert result.cpdag.undirected == {(0, 1)}
    assert result.levels == 1


@pytest.mark.slow
def test_vstructure_recovery():
    """Test the collider 1 -> 3 <- 2 is recovered on most seeds."""
    truth = vstruct3().dag
    exact = 0
    for seed in range(20):
        cpdag = run_pc_ot(sample(vstruct3(), 2000, seed=seed), PcOtConfig(seed=seed)).cpdag
        exact += structural_metrics(cpdag, truth).overall == 0
    assert exact >= 15


@pytest.mark.slow
def test_more_samples_do_not_hurt():
    spec = pcot6()

    def median_loss(n):
        losses = [
            structural_metrics(run_pc_ot(sample(spec, n, seed=seed), PcOtConfig(seed=seed)).cpdag, spec.dag).overall
            for seed in range(20)
        ]
        return float(np.median(losses))

    assert median_loss(2000) <= median_loss(250)
