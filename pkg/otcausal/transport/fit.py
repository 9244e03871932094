"""Maximum-likelihood fit of a triangular map to samples.

The negative log-likelihood of the pullback density separates over map
components, so each component is fitted on its own with BFGS starting from
the identity map.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import optimize

from ..config import FitOptions
from ..errors import DataError, DegenerateMapError, DimensionError
from .spec import TriangularMapSpec
from .triangular import LOG_SQRT_2PI, ComponentEvaluator, log_pullback, map_eval

logger = logging.getLogger(__name__)


class ComponentObjective:
    """Negative log-likelihood of one component and its exact gradient.

    ``S = Phi a + sum_q w_q (Psi_q b)**2`` and ``h = Psi b``; the component's
    share of the NLL is ``mean(S**2 / 2 - log h**2) + log sqrt(2 pi)``.
    """

    def __init__(self, evaluator: ComponentEvaluator, ridge: float = 0.0) -> None:
        self.ev = evaluator
        self.ridge = ridge
        self.phi = evaluator.c()
        self.psi_q = evaluator.hq()
        self.psi_x = evaluator.hx()
        self.w = evaluator.w
        self.n_c = self.phi.shape[1]

    def _terms(self, theta: np.ndarray) -> tuple[np.ndarray, ...]:
        a, b = theta[: self.n_c], theta[self.n_c :]
        hq = self.psi_q @ b
        s = self.phi @ a + np.sum(self.w * hq * hq, axis=1)
        h = self.psi_x @ b
        # dS/db, shape (n, mh)
        ds_db = 2.0 * np.einsum("nq,nqm->nm", self.w * hq, self.psi_q)
        return s, h, ds_db

    def __call__(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        s, h, ds_db = self._terms(theta)
        diag = h * h
        if not np.all(diag > 0):
            return np.inf, np.zeros_like(theta)
        n = s.shape[0]
        value = float(np.mean(0.5 * s * s - np.log(diag)) + LOG_SQRT_2PI)
        grad_a = self.phi.T @ s / n
        grad_b = ds_db.T @ s / n - 2.0 * (self.psi_x.T @ (1.0 / h)) / n
        grad = np.concatenate([grad_a, grad_b])
        if self.ridge:
            value += self.ridge * float(theta @ theta)
            grad = grad + 2.0 * self.ridge * theta
        return value, grad

    def scores(self, theta: np.ndarray) -> np.ndarray:
        """Per-sample gradient of the log pullback density, shape ``(n, m)``."""
        s, h, ds_db = self._terms(theta)
        score_a = -s[:, None] * self.phi
        score_b = -s[:, None] * ds_db + 2.0 * self.psi_x / h[:, None]
        return np.hstack([score_a, score_b])


@dataclass(frozen=True)
class FitDiagnostics:
    """Outcome of a map fit.

    Attributes:
        objective: Final penalized NLL (sum over components)
        grad_norm: Infinity norm of the penalized NLL gradient at the optimum
        iterations: BFGS iterations summed over components
        converged: ``grad_norm <= tol``
        history: Per component, the objective after every accepted iteration
        messages: Per component optimizer status messages
    """

    objective: float
    grad_norm: float
    iterations: int
    converged: bool
    history: tuple[tuple[float, ...], ...] = ()
    messages: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "objective": self.objective,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "messages": list(self.messages),
        }


@dataclass(frozen=True)
class FittedMap:
    """A fitted map together with the column standardization it was fitted on.

    The map acts on standardized coordinates ``z = (x - mean) / scale``.
    """

    spec: TriangularMapSpec
    alpha: np.ndarray
    diagnostics: FitDiagnostics
    mean: np.ndarray
    scale: np.ndarray
    columns: tuple[int, ...] | None = field(default=None)

    @classmethod
    def from_parameters(cls, spec: TriangularMapSpec, alpha) -> FittedMap:
        """Wrap explicit coefficients with an identity standardization."""
        alpha = spec.check_alpha(alpha).copy()
        alpha.setflags(write=False)
        d = spec.dimension
        diagnostics = FitDiagnostics(objective=float("nan"), grad_norm=float("nan"), iterations=0, converged=False)
        return cls(spec, alpha, diagnostics, np.zeros(d), np.ones(d))

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    def standardize(self, samples) -> np.ndarray:
        x = np.asarray(samples, dtype=float)
        return (x - self.mean) / self.scale

    def pushforward(self, samples) -> np.ndarray:
        """Reference-space images ``S(z)`` of raw samples."""
        return map_eval(self.spec, self.alpha, self.standardize(samples))

    def log_density(self, samples) -> np.ndarray | float:
        """Log density of the fitted model in raw coordinates."""
        return log_pullback(self.spec, self.alpha, self.standardize(samples)) - float(np.sum(np.log(self.scale)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "alpha": self.alpha.tolist(),
            "diagnostics": self.diagnostics.to_dict(),
            "standardization": {"mean": self.mean.tolist(), "scale": self.scale.tolist()},
            "columns": list(self.columns) if self.columns is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FittedMap:
        diag = data.get("diagnostics", {})
        columns = data.get("columns")
        return cls(
            spec=TriangularMapSpec.from_dict(data["spec"]),
            alpha=np.asarray(data["alpha"], dtype=float),
            diagnostics=FitDiagnostics(
                objective=float(diag.get("objective", float("nan"))),
                grad_norm=float(diag.get("grad_norm", float("nan"))),
                iterations=int(diag.get("iterations", 0)),
                converged=bool(diag.get("converged", False)),
                messages=tuple(diag.get("messages", ())),
            ),
            mean=np.asarray(data["standardization"]["mean"], dtype=float),
            scale=np.asarray(data["standardization"]["scale"], dtype=float),
            columns=tuple(columns) if columns is not None else None,
        )


def check_samples(samples, dimension: int | None = None) -> np.ndarray:
    """Validate a sample matrix: 2-D, finite, and of the expected width."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise DataError(f"samples must be a 2-D matrix, got shape {x.shape}")
    if dimension is not None and x.shape[1] != dimension:
        raise DimensionError(dimension, x.shape[1], what="sample matrix")
    if x.shape[0] < 1:
        raise DataError("samples must contain at least one row")
    bad = np.argwhere(~np.isfinite(x))
    if bad.size:
        row, col = bad[0]
        raise DataError(f"non-finite value at sample {row}, column {col + 1}")
    return x


def nll_objective(spec: TriangularMapSpec, alpha, samples) -> tuple[float, np.ndarray]:
    """Mean negative log pullback density and its exact gradient in ``alpha``.

    Raises:
        DegenerateMapError: With the first sample whose diagonal partial vanishes
    """
    alpha = spec.check_alpha(alpha)
    x = check_samples(samples, spec.dimension)
    value = 0.0
    grad = np.zeros_like(alpha)
    for k, comp in enumerate(spec.components):
        ev = ComponentEvaluator(spec, k, x)
        h = ev.diagonal_root(alpha)
        bad = np.flatnonzero(~(h * h > 0))
        if bad.size:
            raise DegenerateMapError(sample_index=int(bad[0]), component=k)
        f, g = ComponentObjective(ev)(alpha[comp.block])
        value += f
        grad[comp.block] = g
    return value, grad


def score_matrix(spec: TriangularMapSpec, alpha, samples) -> np.ndarray:
    """Per-sample alpha-gradients of the log pullback density, shape ``(n, P)``."""
    alpha = spec.check_alpha(alpha)
    x = np.asarray(samples, dtype=float)
    blocks = []
    for k, comp in enumerate(spec.components):
        blocks.append(ComponentObjective(ComponentEvaluator(spec, k, x)).scores(alpha[comp.block]))
    return np.hstack(blocks)


def fit_map(
    spec: TriangularMapSpec,
    samples,
    opts: FitOptions | None = None,
    columns: tuple[int, ...] | None = None,
) -> FittedMap:
    """Fit the map by maximum likelihood.

    Columns are standardized first; every component is then minimized with
    BFGS from the identity map until the gradient infinity norm drops below
    ``opts.tol`` or ``opts.max_iters`` is reached.

    Args:
        spec: Map layout, one component per sample column
        samples: Raw sample matrix ``(n, d)``
        opts: Fit options
        columns: Optional original column indices, recorded on the result

    Returns:
        The fitted map with diagnostics and the standardization record

    Raises:
        DataError: Non-finite data, constant columns, or a non-finite initial objective
        DegenerateMapError: If the fitted diagonal partial vanishes at a sample
    """
    opts = opts or FitOptions()
    x = check_samples(samples, spec.dimension)
    n = x.shape[0]
    if n < spec.n_coefficients:
        logger.warning(
            "Fitting %d coefficients on %d samples; the fit relies on the ridge penalty",
            spec.n_coefficients,
            n,
        )

    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    constant = np.flatnonzero(~(scale > 0))
    if constant.size:
        raise DataError(f"column {constant[0] + 1} is constant and cannot be standardized")
    z = (x - mean) / scale

    alpha = spec.identity_alpha()
    histories: list[tuple[float, ...]] = []
    messages: list[str] = []
    iterations = 0
    objective = 0.0
    grad_norm = 0.0

    for k, comp in enumerate(spec.components):
        fun = ComponentObjective(ComponentEvaluator(spec, k, z), ridge=opts.ridge)
        theta0 = alpha[comp.block].copy()
        f0, _ = fun(theta0)
        if not np.isfinite(f0):
            raise DataError(f"non-finite objective at initialization in component {k + 1}")

        history = [f0]
        result = optimize.minimize(
            fun,
            theta0,
            jac=True,
            method="BFGS",
            callback=history_recorder(history),
            options={"gtol": opts.tol, "maxiter": opts.max_iters, "norm": np.inf},
        )
        theta = result.x if result.fun <= f0 else theta0
        f, g = fun(theta)
        alpha[comp.block] = theta
        objective += f
        grad_norm = max(grad_norm, float(np.max(np.abs(g))) if g.size else 0.0)
        iterations += int(result.nit)
        histories.append(tuple(history))
        messages.append(str(result.message))
        logger.debug("Component %d: nll=%.6g |grad|=%.3g nit=%d (%s)", k + 1, f, grad_norm, result.nit, result.message)

    for k in range(spec.dimension):
        h = ComponentEvaluator(spec, k, z).diagonal_root(alpha)
        bad = np.flatnonzero(~(h * h > 0))
        if bad.size:
            raise DegenerateMapError(sample_index=int(bad[0]), component=k)

    converged = grad_norm <= opts.tol
    if not converged:
        logger.warning("Map fit stopped with gradient norm %.3g > tol %.3g", grad_norm, opts.tol)
    logger.info("Fitted %d-dimensional map on %d samples: nll=%.6g", spec.dimension, n, objective)

    alpha.setflags(write=False)
    diagnostics = FitDiagnostics(
        objective=objective,
        grad_norm=grad_norm,
        iterations=iterations,
        converged=converged,
        history=tuple(histories),
        messages=tuple(messages),
    )
    return FittedMap(spec, alpha, diagnostics, mean, scale, columns)


def history_recorder(history: list[float]):
    """BFGS callback appending the objective value of every iterate to ``history``."""

    def record(intermediate_result: optimize.OptimizeResult) -> None:
        history.append(float(intermediate_result.fun))

    return record
