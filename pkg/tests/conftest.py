import numpy as np
import pytest

from otcausal.transport import TriangularMapSpec
from tests.helpers import gaussian_pair


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def spec2() -> TriangularMapSpec:
    """Degree-2 map on two variables."""
    return TriangularMapSpec.total_degree(2, 2)


@pytest.fixture
def correlated_samples() -> np.ndarray:
    return gaussian_pair(0.5, 2000, seed=7)
