"""Shared sample generators and exact maps for the test suite."""

import numpy as np

from otcausal.basis import BasisTerm
from otcausal.transport import TriangularMapSpec


def gaussian_pair(rho: float, n: int, seed: int = 0) -> np.ndarray:
    """Standard bivariate Gaussian samples with correlation ``rho``."""
    cov = np.array([[1.0, rho], [rho, 1.0]])
    return np.random.default_rng(seed).multivariate_normal(np.zeros(2), cov, size=n)


def linear_gaussian_alpha(spec: TriangularMapSpec, rho: float) -> np.ndarray:
    """Coefficients of the exact map ``(x1, (x2 - rho x1) / sqrt(1 - rho^2))``."""
    s = np.sqrt(1.0 - rho * rho)
    alpha = spec.identity_alpha()
    alpha[spec.coefficient_index(1, "c", BasisTerm.polynomial([1]))] = -rho / s
    alpha[spec.coefficient_index(1, "h", BasisTerm.constant(2))] = 1.0 / np.sqrt(s)
    return alpha


def perturbed_alpha(spec: TriangularMapSpec, seed: int, scale: float = 0.05) -> np.ndarray:
    """Identity coefficients plus small Gaussian noise."""
    rng = np.random.default_rng(seed)
    return spec.identity_alpha() + scale * rng.standard_normal(spec.n_coefficients)


def random_dag(d: int, edge_prob: float, seed: int):
    """Random DAG whose edges follow a random vertex order."""
    from otcausal.graph import Dag

    rng = np.random.default_rng(seed)
    order = rng.permutation(d)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(d)
        for j in range(i + 1, d)
        if rng.random() < edge_prob
    ]
    return Dag(d, frozenset(edges))
