"""Empirical one-dimensional monotone transport.

In one dimension the increasing transport from ``mu`` to ``nu`` is
``F_nu^{-1} o F_mu``; replacing both by their empirical versions gives a
nondecreasing step map, used as an oracle for fitted triangular components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MonotoneStepMap:
    """Nondecreasing map ``x -> Q_target(F_source(x))``."""

    source: np.ndarray
    target: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = self.source.shape[0]
        # mid-rank empirical c.d.f. keeps the quantile inside (0, 1)
        ranks = np.searchsorted(self.source, x, side="right")
        u = np.clip((ranks - 0.5) / n, 0.5 / n, 1.0 - 0.5 / n)
        return np.quantile(self.target, u)


def brenier_1d(source_samples, target_samples) -> MonotoneStepMap:
    """Empirical increasing transport map between two 1-D samples.

    Args:
        source_samples: Samples of the source distribution
        target_samples: Samples of the target distribution

    Returns:
        A callable nondecreasing map

    Raises:
        ValueError: If either sample is empty
    """
    source = np.sort(np.asarray(source_samples, dtype=float).ravel())
    target = np.sort(np.asarray(target_samples, dtype=float).ravel())
    if source.size == 0 or target.size == 0:
        raise ValueError("brenier_1d needs nonempty source and target samples")
    return MonotoneStepMap(source, target)
