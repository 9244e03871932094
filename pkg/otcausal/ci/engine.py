"""Conditional-independence scores read off a fitted pullback density.

For a map fitted on the columns ``Z``, variables ``k`` and ``ell`` are
independent given the rest of ``Z`` exactly when the mixed partial
``d2 log pi / dx_k dx_l`` vanishes. The score ``Omega`` is the sample mean of
its square; its spread is estimated with the delta method through the Fisher
information of the map coefficients.

Scores are computed in the standardized coordinates the map was fitted in,
which makes them invariant to the units of the data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg

from ..config import CiOptions, FitOptions
from ..errors import ConditioningError, DegenerateMapError, DimensionError, FitError, OtCausalError
from ..transport import ComponentEvaluator, FittedMap, TriangularMapSpec, fit_map, score_matrix
from ..transport.triangular import as_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FisherEstimate:
    """Empirical Fisher information of the map coefficients.

    Attributes:
        matrix: Symmetric PSD matrix, regularized by ``ridge * I``
        ridge: The regularization added to the diagonal
        n: Number of samples it was estimated from
    """

    matrix: np.ndarray
    ridge: float
    n: int


@dataclass(frozen=True)
class OmegaReport:
    """Pairwise CI scores, deviations, thresholds and decisions for a subset.

    Tables are indexed by position in ``subset``; use :meth:`position` to
    translate variable indices.
    """

    subset: tuple[int, ...]
    omega: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray
    decisions: np.ndarray
    delta: float
    threshold: str = "std"
    orders: tuple[tuple[int, ...], ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def position(self, variable: int) -> int:
        try:
            return self.subset.index(variable)
        except ValueError:
            raise KeyError(f"variable X{variable + 1} is not in subset {self.subset}") from None

    def independent(self, k: int, ell: int) -> bool:
        """Decision for variables ``k`` and ``ell`` (variable indices)."""
        return bool(self.decisions[self.position(k), self.position(ell)])

    def score(self, k: int, ell: int) -> float:
        return float(self.omega[self.position(k), self.position(ell)])

    def pairs(self) -> list[tuple[int, int]]:
        """All unordered variable pairs of the subset."""
        return [
            (self.subset[i], self.subset[j])
            for i in range(len(self.subset))
            for j in range(i + 1, len(self.subset))
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "subset": [v + 1 for v in self.subset],
            "delta": self.delta,
            "threshold": self.threshold,
            "omega": self.omega.tolist(),
            "sigma": self.sigma.tolist(),
            "tau": self.tau.tolist(),
            "decisions": self.decisions.tolist(),
            "orders": [[v + 1 for v in order] for order in self.orders],
        }


def _contract(weights: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("nq,nqm->nm", weights, basis)


def mixed_second_with_gradient(
    fitted: FittedMap, z: np.ndarray, k: int, ell: int, with_grad: bool = True
) -> tuple[np.ndarray, np.ndarray | None]:
    """Mixed partial ``d2 log pi / dz_k dz_l`` at standardized points, and its alpha-gradient.

    Only components ``m >= max(k, ell)`` depend on both coordinates. For each of
    them the contribution is ``-dS_m/dz_k * dS_m/dz_l - S_m * d2S_m/dz_k dz_l
    + d2 log(h_m**2)/dz_k dz_l``; ``h_m`` is linear in its coefficients, which
    makes the alpha-gradient of every factor a basis matrix contraction.

    Args:
        fitted: The fitted map
        z: Standardized points, shape ``(n, d)``
        k: First coordinate (0-based, map order)
        ell: Second coordinate, different from ``k``
        with_grad: Also return the gradient

    Returns:
        ``(values, grad)`` with shapes ``(n,)`` and ``(n, P)`` (``None`` if not requested)
    """
    spec = fitted.spec
    d = spec.dimension
    if k == ell:
        raise ValueError("mixed partial needs two different coordinates")
    if not (0 <= k < d and 0 <= ell < d):
        raise DimensionError(d, max(k, ell) + 1, what="coordinate index")
    i, j = min(k, ell), max(k, ell)
    alpha = fitted.alpha
    n = z.shape[0]
    values = np.zeros(n)
    grad = np.zeros((n, spec.n_coefficients)) if with_grad else None

    for m in range(j, d):
        ev = ComponentEvaluator(spec, m, z)
        a, b = ev.split(alpha)
        w = ev.w
        psi_q = ev.hq()
        hq = psi_q @ b
        psi_x = ev.hx()
        h = psi_x @ b
        bad = np.flatnonzero(~(h * h > 0))
        if bad.size:
            raise DegenerateMapError(sample_index=int(bad[0]), component=m)

        s = ev.c() @ a + np.sum(w * hq * hq, axis=1)
        hx_i, hx_j, hx_ij = ev.hx(i) @ b, ev.hx(j) @ b, ev.hx(i, j) @ b
        log_term = 2.0 * (hx_ij / h - hx_i * hx_j / (h * h))

        hq_i = ev.hq(i) @ b
        j_i = ev.c(i) @ a + np.sum(w * 2.0 * hq * hq_i, axis=1)
        if j < m:
            hq_j = ev.hq(j) @ b
            hq_ij = ev.hq(i, j) @ b
            j_j = ev.c(j) @ a + np.sum(w * 2.0 * hq * hq_j, axis=1)
            hess = ev.c(i, j) @ a + np.sum(w * 2.0 * (hq_i * hq_j + hq * hq_ij), axis=1)
        else:
            j_j = h * h
            hess = 2.0 * h * hx_i

        values += -j_i * j_j - s * hess + log_term
        if grad is None:
            continue

        psi_q_i = ev.hq(i)
        ds_a, ds_b = ev.c(), 2.0 * _contract(w * hq, psi_q)
        dji_a = ev.c(i)
        dji_b = 2.0 * (_contract(w * hq_i, psi_q) + _contract(w * hq, psi_q_i))
        if j < m:
            psi_q_j, psi_q_ij = ev.hq(j), ev.hq(i, j)
            djj_a = ev.c(j)
            djj_b = 2.0 * (_contract(w * hq_j, psi_q) + _contract(w * hq, psi_q_j))
            dh_a = ev.c(i, j)
            dh_b = 2.0 * (
                _contract(w * hq_j, psi_q_i)
                + _contract(w * hq_i, psi_q_j)
                + _contract(w * hq_ij, psi_q)
                + _contract(w * hq, psi_q_ij)
            )
        else:
            djj_a = np.zeros_like(ds_a)
            djj_b = 2.0 * h[:, None] * psi_x
            dh_a = np.zeros_like(ds_a)
            dh_b = 2.0 * (psi_x * hx_i[:, None] + h[:, None] * ev.hx(i))

        psi_x_i, psi_x_j, psi_x_ij = ev.hx(i), ev.hx(j), ev.hx(i, j)
        hc = h[:, None]
        dlog_b = 2.0 * (
            psi_x_ij / hc
            - hx_ij[:, None] * psi_x / hc**2
            - (psi_x_i * hx_j[:, None] + hx_i[:, None] * psi_x_j) / hc**2
            + 2.0 * (hx_i * hx_j)[:, None] * psi_x / hc**3
        )

        jj, ji, hh, ss = j_j[:, None], j_i[:, None], hess[:, None], s[:, None]
        grad[:, ev.layout.c_slice] += -(dji_a * jj + ji * djj_a) - (ds_a * hh + ss * dh_a)
        grad[:, ev.layout.h_slice] += -(dji_b * jj + ji * djj_b) - (ds_b * hh + ss * dh_b) + dlog_b

    return values, grad


def log_density_mixed_second(fitted: FittedMap, x, k: int, ell: int) -> np.ndarray | float:
    """Mixed second partial of the fitted log density at ``x``.

    ``x`` is in raw coordinates; the derivative is taken with respect to the
    standardized coordinates ``k`` and ``ell``.
    """
    batch, single = as_batch(x, fitted.dimension)
    values, _ = mixed_second_with_gradient(fitted, fitted.standardize(batch), k, ell, with_grad=False)
    return float(values[0]) if single else values


def omega_score(fitted: FittedMap, samples, k: int, ell: int) -> float:
    """Mean squared mixed partial of the log density over the samples."""
    batch, _ = as_batch(samples, fitted.dimension)
    values, _ = mixed_second_with_gradient(fitted, fitted.standardize(batch), k, ell, with_grad=False)
    return float(np.mean(values * values))


def omega_gradient(fitted: FittedMap, samples, k: int, ell: int) -> tuple[float, np.ndarray]:
    """``Omega`` and its exact gradient with respect to the map coefficients."""
    batch, _ = as_batch(samples, fitted.dimension)
    values, grad = mixed_second_with_gradient(fitted, fitted.standardize(batch), k, ell)
    assert grad is not None
    omega = float(np.mean(values * values))
    return omega, 2.0 * (values @ grad) / values.shape[0]


def fisher_information(
    fitted: FittedMap, samples, ridge: float | None = None, relative_ridge: float = 1e-8
) -> FisherEstimate:
    """Empirical Fisher information at the fitted coefficients.

    Args:
        fitted: The fitted map
        samples: Raw samples, at least two rows
        ridge: Absolute diagonal regularization; by default
            ``relative_ridge * trace / dim``
        relative_ridge: Factor of the default regularization

    Returns:
        The regularized estimate
    """
    batch, _ = as_batch(samples, fitted.dimension)
    n = batch.shape[0]
    if n < 2:
        raise ValueError("Fisher information needs at least two samples")
    scores = score_matrix(fitted.spec, fitted.alpha, fitted.standardize(batch))
    matrix = scores.T @ scores / n
    matrix = 0.5 * (matrix + matrix.T)
    dim = matrix.shape[0]
    if ridge is None:
        trace = float(np.trace(matrix))
        ridge = relative_ridge * trace / dim if trace > 0 else relative_ridge
    matrix = matrix + ridge * np.eye(dim)
    return FisherEstimate(matrix=matrix, ridge=float(ridge), n=n)


def quadratic_form(fisher: FisherEstimate, gradient: np.ndarray) -> float:
    """``g^T Gamma^{-1} g`` via a Cholesky solve.

    Raises:
        ConditioningError: If the regularized matrix is not positive definite
    """
    if not np.any(gradient):
        return 0.0
    try:
        factor = linalg.cho_factor(fisher.matrix, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise ConditioningError(f"Fisher information is not positive definite: {e}") from e
    return float(max(gradient @ linalg.cho_solve(factor, gradient), 0.0))


def omega_sigma(fitted: FittedMap, samples, k: int, ell: int, fisher: FisherEstimate) -> float:
    """Delta-method spread ``(1/n) grad(Omega)^T Gamma^{-1} grad(Omega)``."""
    batch, _ = as_batch(samples, fitted.dimension)
    _, grad = omega_gradient(fitted, batch, k, ell)
    return quadratic_form(fisher, grad) / batch.shape[0]


def _orders_for(subset: tuple[int, ...], count: int, seed: int) -> list[tuple[int, ...]]:
    orders = [subset]
    rng = np.random.default_rng(seed)
    attempts = 0
    while len(orders) < count and attempts < 100 * count:
        candidate = tuple(int(v) for v in rng.permutation(subset))
        attempts += 1
        if candidate not in orders:
            orders.append(candidate)
    return orders


def omega_report(
    samples,
    subset: Sequence[int],
    fit_opts: FitOptions | None = None,
    ci_opts: CiOptions | None = None,
) -> OmegaReport:
    """Fit a map on the ``subset`` columns and test every pair inside it.

    The map is fitted in ascending variable order; with ``ci_opts.orders > 1``
    scores and spreads are averaged over additional random orders. The
    threshold is ``delta * sqrt(sigma)`` (``threshold="std"``) or
    ``delta * sigma`` (``threshold="variance"``) and a pair is declared
    independent when ``omega < tau``.

    Raises:
        FitError: If a fit fails, with the subset attached
    """
    fit_opts = fit_opts or FitOptions()
    ci_opts = ci_opts or CiOptions()
    x = np.asarray(samples, dtype=float)
    z_vars = tuple(sorted(set(int(v) for v in subset)))
    if len(z_vars) < 2:
        raise ValueError(f"a CI subset needs at least two variables, got {z_vars}")
    if x.ndim != 2 or z_vars[-1] >= x.shape[1] or z_vars[0] < 0:
        raise DimensionError(z_vars[-1] + 1, x.shape[1] if x.ndim == 2 else 0, what="sample matrix")

    size = len(z_vars)
    omega = np.zeros((size, size))
    sigma = np.zeros((size, size))
    orders = _orders_for(z_vars, ci_opts.orders, ci_opts.seed)
    spec = TriangularMapSpec.total_degree(size, fit_opts.degree, fit_opts.quadrature_order)

    for order in orders:
        cols = x[:, list(order)]
        try:
            fitted = fit_map(spec, cols, fit_opts, columns=order)
            fisher = fisher_information(fitted, cols, relative_ridge=ci_opts.fisher_ridge)
            for p in range(size):
                for q in range(p + 1, size):
                    om, grad = omega_gradient(fitted, cols, p, q)
                    sg = quadratic_form(fisher, grad) / cols.shape[0]
                    a, b = z_vars.index(order[p]), z_vars.index(order[q])
                    omega[a, b] += om
                    omega[b, a] += om
                    sigma[a, b] += sg
                    sigma[b, a] += sg
        except FitError:
            raise
        except OtCausalError as e:
            raise FitError(f"CI fit failed: {e}", subset=z_vars) from e

    omega /= len(orders)
    sigma /= len(orders)
    if ci_opts.threshold == "std":
        tau = ci_opts.delta * np.sqrt(sigma)
    else:
        tau = ci_opts.delta * sigma
    decisions = omega < tau
    np.fill_diagonal(decisions, False)
    np.fill_diagonal(tau, 0.0)

    logger.debug("Omega report for %s: omega=%s tau=%s", z_vars, omega.tolist(), tau.tolist())
    return OmegaReport(
        subset=z_vars,
        omega=omega,
        sigma=sigma,
        tau=tau,
        decisions=decisions,
        delta=ci_opts.delta,
        threshold=ci_opts.threshold,
        orders=tuple(orders),
    )
