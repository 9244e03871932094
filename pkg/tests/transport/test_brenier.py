"""Tests for the empirical one-dimensional monotone map."""

import numpy as np
import pytest

from otcausal.transport import brenier_1d


def test_monotone_and_matches_quantiles(rng):
    source = rng.exponential(size=4000)
    target = rng.standard_normal(4000)
    step = brenier_1d(source, target)
    grid = np.linspace(0, 5, 200)
    assert np.all(np.diff(step(grid)) >= 0)
    median = step(np.median(source))
    assert median == pytest.approx(0.0, abs=0.1)


def test_identity_on_equal_samples(rng):
    x = rng.standard_normal(1000)
    step = brenier_1d(x, x)
    inner = np.sort(x)[100:900]
    np.testing.assert_allclose(step(inner), inner, atol=0.05)


def test_empty_samples_rejected():
    with pytest.raises(ValueError, match="nonempty"):
        brenier_1d([], [1.0])


def _affine_case(rng):
    source = rng.standard_normal(20000)
    target = 2.0 * rng.standard_normal(20000) + 3.0
    return source, target, np.linspace(-1.5, 1.5, 61), lambda x: 2.0 * x + 3.0, 0.15


def _square_case(rng):
    source = rng.uniform(size=20000)
    return source, source**2, np.linspace(0.05, 0.95, 61), np.square, 0.01


@pytest.mark.parametrize("case", [_affine_case, _square_case], ids=["affine", "square"])
def test_matches_known_transport(rng, case):
    """Test the empirical map against maps known in closed form."""
    source, target, grid, expected, atol = case(rng)
    step = brenier_1d(source, target)
    np.testing.assert_allclose(step(grid), expected(grid), atol=atol)


def test_affine_slope_and_intercept(rng):
    step = brenier_1d(rng.standard_normal(20000), 2.0 * rng.standard_normal(20000) + 3.0)
    grid = np.linspace(-1.5, 1.5, 61)
    slope, intercept = np.polyfit(grid, step(grid), 1)
    assert slope == pytest.approx(2.0, abs=0.05)
    assert intercept == pytest.approx(3.0, abs=0.05)
