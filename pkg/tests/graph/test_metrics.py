"""Tests for structural error counts."""

import pytest

from otcausal.errors import DimensionError
from otcausal.graph import Pdag, essential_graph, parse_edges, structural_metrics


@pytest.fixture
def truth():
    return parse_edges("1->3 2->3 3->4")


def test_exact_recovery_scores_zero(truth):
    metrics = structural_metrics(essential_graph(truth), truth)
    assert metrics.to_dict() == {"missing": 0, "extra": 0, "misoriented": 0, "overall": 0}


def test_counts_missing_extra_and_misoriented(truth):
    estimate = Pdag(4, directed={(0, 2), (2, 1)}, undirected={(0, 1)})
    metrics = structural_metrics(estimate, truth)
    assert metrics.missing == 1
    assert metrics.extra == 1
    assert metrics.misoriented == 1
    assert metrics.overall == 3


def test_undirected_where_truth_is_compelled(truth):
    estimate = Pdag(4, undirected={(0, 2), (1, 2), (2, 3)})
    assert structural_metrics(estimate, truth).misoriented == 3


def test_conflicted_edges_count_as_misoriented():
    truth = parse_edges("1->2 2->3")
    estimate = Pdag(3, undirected={(0, 1), (1, 2)}, conflicted={(0, 1)})
    assert structural_metrics(estimate, truth).misoriented == 1


def test_dimension_mismatch(truth):
    with pytest.raises(DimensionError):
        structural_metrics(Pdag(3), truth)
