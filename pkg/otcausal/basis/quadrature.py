"""Gauss–Legendre quadrature for the monotone-map integral."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in (-1, 1) and positive weights summing to 2."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return int(self.nodes.shape[0])

    def scaled(self, upper: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map the rule onto [0, upper] for every entry of ``upper``.

        Args:
            upper: Upper integration limits, any shape ``s``

        Returns:
            ``(points, weights)`` of shape ``s + (order,)`` such that
            ``sum(weights * f(points), axis=-1)`` approximates the integral of
            ``f`` from 0 to ``upper`` (negative limits give a signed integral).
        """
        upper = np.asarray(upper, dtype=float)[..., None]
        half = 0.5 * upper
        return half * (1.0 + self.nodes), half * self.weights

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        """Integrate a vectorized callable over [a, b]."""
        half = 0.5 * (b - a)
        points = half * self.nodes + 0.5 * (a + b)
        return float(half * np.sum(self.weights * f(points)))


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> QuadratureRule:
    """Return the ``order``-point Gauss–Legendre rule on [-1, 1].

    The rule integrates polynomials of degree ``2*order - 1`` exactly.

    Raises:
        ValueError: If ``order`` < 1
    """
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    nodes, weights = special.roots_legendre(order)
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)
