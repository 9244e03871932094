"""ANM and PNL scores of variable orderings.

For an ordering σ a triangular map ``S`` is fitted on the σ-permuted,
standardized columns. Each component is then recalibrated by a monotone
univariate map ``B_k(u) = ∫_0^u b_k(t)^2 dt`` with
``b_k = β_0 + Σ_s β_{s+1} ψ_s`` (Hermite functions):

* ANM: ``∂/∂z_k (B_k ∘ S_k)`` should equal one at every sample; the score of
  component k is ``Σ_i |b_k(S_k)^2 · ∂_k S_k − 1|``.
* PNL: ``∂²/∂z_l ∂z_k (B_k ∘ S_k)`` should vanish for every ``l < k``; the
  score is the summed absolute value over samples and ``l`` after scaling
  ``B_k`` so that the mean diagonal derivative is one.

β is optimized on a Huber-smoothed objective with decreasing widths; the
reported losses are the exact absolute sums.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial
from typing import Any, Literal

import numpy as np
from scipy import optimize

from ..basis import gauss_legendre, hermite_fn_table
from ..config import OrderOptions
from ..errors import FitError, InconsistentGraphError, OtCausalError
from ..graph import Dag, Ordering, Pdag, possible_orderings
from ..parallel import map_ordered
from ..transport import FittedMap, TriangularMapSpec, check_samples, fit_map, history_recorder
from ..transport.triangular import ComponentEvaluator

logger = logging.getLogger(__name__)

LossKind = Literal["anm", "pnl"]


@dataclass(frozen=True)
class BkSpec:
    """Basis of the recalibration root ``b``: a constant plus ``ψ_0..ψ_degree``."""

    degree: int = 3
    quadrature_order: int = 24

    @property
    def n_coefficients(self) -> int:
        return self.degree + 2

    def identity_beta(self) -> np.ndarray:
        beta = np.zeros(self.n_coefficients)
        beta[0] = 1.0
        return beta

    def basis(self, u) -> tuple[np.ndarray, np.ndarray]:
        """Basis values and first derivatives at ``u``, each of shape ``u.shape + (m,)``."""
        u = np.asarray(u, dtype=float)
        table = hermite_fn_table(self.degree, u)
        ones = np.ones((*u.shape, 1))
        return (
            np.concatenate([ones, table[0]], axis=-1),
            np.concatenate([np.zeros_like(ones), table[1]], axis=-1),
        )

    def root(self, beta, u) -> np.ndarray:
        return self.basis(u)[0] @ np.asarray(beta, dtype=float)

    def derivative(self, beta, u) -> np.ndarray:
        """``B'(u) = b(u)^2``."""
        b = self.root(beta, u)
        return b * b

    def evaluate(self, beta, u) -> np.ndarray:
        """``B(u)`` by Gauss-Legendre quadrature on ``[0, u]``."""
        t, w = gauss_legendre(self.quadrature_order).scaled(u)
        b = self.basis(t)[0] @ np.asarray(beta, dtype=float)
        return np.sum(w * b * b, axis=-1)

    def evaluate_with_gradient(self, beta, u) -> tuple[np.ndarray, np.ndarray]:
        t, w = gauss_legendre(self.quadrature_order).scaled(u)
        v = self.basis(t)[0]
        b = v @ np.asarray(beta, dtype=float)
        return np.sum(w * b * b, axis=-1), np.sum((w * 2.0 * b)[..., None] * v, axis=-2)


@dataclass(frozen=True)
class BkFit:
    """Result of one recalibration fit.

    Attributes:
        beta: Coefficients of ``b_k``
        loss: Unsmoothed loss of the component
        converged: Whether the last smoothing stage met the tolerance
        history: Smoothed objective per iterate, all stages concatenated
    """

    beta: np.ndarray
    loss: float
    converged: bool = True
    history: tuple[float, ...] = ()


@dataclass(frozen=True)
class OrderingScore:
    """Weighted loss of one ordering."""

    ordering: Ordering
    kind: str
    losses: tuple[float, ...]
    gamma: tuple[float, ...]
    n: int
    betas: tuple[tuple[float, ...], ...] = ()
    converged: tuple[bool, ...] = ()
    map_converged: bool = True

    @property
    def total(self) -> float:
        return float(sum(g * loss for g, loss in zip(self.gamma, self.losses, strict=True)))

    def to_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {"ordering": self.ordering.label()}
        for k, loss in enumerate(self.losses):
            row[f"loss_{k + 1}"] = loss
        row["total"] = self.total
        return row

    def to_dict(self) -> dict[str, Any]:
        return {
            "ordering": self.ordering.label(),
            "kind": self.kind,
            "losses": list(self.losses),
            "gamma": list(self.gamma),
            "total": self.total,
            "n": self.n,
            "betas": [list(b) for b in self.betas],
            "converged": list(self.converged),
            "map_converged": self.map_converged,
        }


@dataclass(frozen=True)
class OrderingSelection:
    """Outcome of :func:`select_ordering`; ``scores`` are sorted best first."""

    dag: Dag
    ordering: Ordering
    scores: tuple[OrderingScore, ...]
    kind: str

    def rank_of(self, ordering: Ordering) -> int | None:
        """1-based rank of ``ordering``, or ``None`` if it was not scored."""
        for i, score in enumerate(self.scores):
            if score.ordering == ordering:
                return i + 1
        return None

    def table(self) -> list[dict[str, Any]]:
        return ordering_table(self.scores)


def ordering_table(scores: Sequence[OrderingScore]) -> list[dict[str, Any]]:
    """One row per ordering with per-component losses, total and rank."""
    ranked = sorted(scores, key=lambda s: (s.total, s.ordering.order))
    rows = []
    for rank, score in enumerate(ranked, start=1):
        row = score.to_row()
        row["rank"] = rank
        rows.append(row)
    return rows


def _huber(r: np.ndarray, width: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.abs(r)
    value = np.where(a <= width, 0.5 * r * r / width, a - 0.5 * width)
    return value, np.clip(r / width, -1.0, 1.0)


class _Component:
    """Map quantities of component ``k`` at the standardized samples."""

    def __init__(self, fitted: FittedMap, k: int, samples) -> None:
        z = fitted.standardize(check_samples(samples, fitted.dimension))
        jet = ComponentEvaluator(fitted.spec, k, z).jet(fitted.alpha)
        self.k = k
        self.n = z.shape[0]
        self.s = jet.value
        self.h2 = jet.root * jet.root
        # dS_k/dz_l and d2 S_k / dz_l dz_k for l < k
        self.jac = jet.grad[:, :k]
        self.cross = jet.hess[:, :k, k]


def _anm_residual(bk: BkSpec, comp: _Component, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v, _ = bk.basis(comp.s)
    b = v @ beta
    r = b * b * comp.h2 - 1.0
    dr = (2.0 * b * comp.h2)[:, None] * v
    return r, dr


def _pnl_terms(bk: BkSpec, comp: _Component, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mixed partials ``q`` of shape (n, k) and their β-gradients (n, k, m)."""
    v, dv = bk.basis(comp.s)
    b = v @ beta
    db = dv @ beta
    q = (2.0 * b * db * comp.h2)[:, None] * comp.jac + (b * b)[:, None] * comp.cross
    grad_bdb = v * db[:, None] + dv * b[:, None]
    dq = (
        2.0 * (comp.h2[:, None, None] * comp.jac[:, :, None]) * grad_bdb[:, None, :]
        + 2.0 * (b[:, None, None] * comp.cross[:, :, None]) * v[:, None, :]
    )
    return q, dq


def _pnl_scale(
    bk: BkSpec, comp: _Component, beta: np.ndarray, normalization: str
) -> tuple[float, np.ndarray]:
    if normalization == "unit_variance":
        values, grads = bk.evaluate_with_gradient(beta, comp.s)
        centered = values - values.mean()
        sd = float(np.sqrt(np.mean(centered * centered)))
        if sd <= 0:
            return 0.0, np.zeros_like(beta)
        return sd, np.mean(centered[:, None] * (grads - grads.mean(axis=0)), axis=0) / sd
    v, _ = bk.basis(comp.s)
    b = v @ beta
    return float(np.mean(b * b * comp.h2)), np.mean((2.0 * b * comp.h2)[:, None] * v, axis=0)


def anm_component_loss(fitted: FittedMap, k: int, samples, beta, bk: BkSpec | None = None) -> float:
    """Unsmoothed ANM loss of component ``k`` for a given ``beta``."""
    bk = bk or BkSpec()
    r, _ = _anm_residual(bk, _Component(fitted, k, samples), np.asarray(beta, dtype=float))
    return float(np.sum(np.abs(r)))


def pnl_component_loss(
    fitted: FittedMap,
    k: int,
    samples,
    beta,
    bk: BkSpec | None = None,
    normalization: str | None = None,
) -> float:
    """Unsmoothed PNL loss of component ``k`` for a given ``beta``.

    With ``normalization=None`` the mixed partials of ``B_k`` as given are
    summed; otherwise ``B_k`` is first rescaled by the named normalization.
    """
    bk = bk or BkSpec()
    if k == 0:
        return 0.0
    comp = _Component(fitted, k, samples)
    beta = np.asarray(beta, dtype=float)
    q, _ = _pnl_terms(bk, comp, beta)
    scale = 1.0 if normalization is None else _pnl_scale(bk, comp, beta, normalization)[0]
    return float(np.sum(np.abs(q)) / scale)


def _minimize_stages(fun_for_width, beta0: np.ndarray, opts: OrderOptions) -> tuple[np.ndarray, bool, list[float]]:
    beta = beta0
    history: list[float] = []
    converged = True
    for width in opts.huber_widths:
        fun = fun_for_width(width)
        f0, _ = fun(beta)
        history.append(f0)
        result = optimize.minimize(
            fun,
            beta,
            jac=True,
            method="BFGS",
            callback=history_recorder(history),
            options={"gtol": opts.fit.tol, "maxiter": opts.max_iters, "norm": np.inf},
        )
        if np.isfinite(result.fun) and result.fun <= f0:
            beta = result.x
        converged = bool(result.success)
    return beta, converged, history


def fit_bk_anm(fitted: FittedMap, k: int, samples, opts: OrderOptions | None = None) -> BkFit:
    """Fit ``B_k`` so that ``B_k ∘ S_k`` has unit derivative in ``z_k``.

    Args:
        fitted: Map fitted on the σ-permuted samples
        k: Component index in σ-order
        samples: The σ-permuted raw samples the map was fitted on
        opts: Score options

    Returns:
        β*, the unsmoothed loss ``Σ_i |r_i|`` and optimizer diagnostics
    """
    opts = opts or OrderOptions()
    bk = BkSpec(opts.bk_degree)
    comp = _Component(fitted, k, samples)
    ridge = opts.ridge

    def objective(width: float):
        def fun(beta: np.ndarray) -> tuple[float, np.ndarray]:
            r, dr = _anm_residual(bk, comp, beta)
            value, slope = _huber(r, width)
            f = float(np.mean(value)) + ridge * float(beta @ beta)
            g = np.mean(slope[:, None] * dr, axis=0) + 2.0 * ridge * beta
            return f, g

        return fun

    beta, converged, history = _minimize_stages(objective, bk.identity_beta(), opts)
    r, _ = _anm_residual(bk, comp, beta)
    loss = float(np.sum(np.abs(r)))
    if not converged:
        logger.warning("ANM recalibration of component %d did not converge", k + 1)
    logger.debug("ANM component %d: loss/n=%.4g", k + 1, loss / comp.n)
    return BkFit(beta=beta, loss=loss, converged=converged, history=tuple(history))


def fit_bk_pnl(fitted: FittedMap, k: int, samples, opts: OrderOptions | None = None) -> BkFit:
    """Fit ``B_k`` so that ``B_k ∘ S_k`` has vanishing mixed partials ``∂_l ∂_k``, ``l < k``.

    The objective is invariant to rescaling ``b``; the normalization of
    ``opts.pnl_normalization`` fixes the scale and the returned ``beta`` is
    rescaled to satisfy it. For ``k = 0`` the loss is zero.
    """
    opts = opts or OrderOptions()
    bk = BkSpec(opts.bk_degree)
    if k == 0:
        return BkFit(beta=bk.identity_beta(), loss=0.0)
    comp = _Component(fitted, k, samples)
    normalization = opts.pnl_normalization

    def objective(width: float):
        def fun(beta: np.ndarray) -> tuple[float, np.ndarray]:
            q, dq = _pnl_terms(bk, comp, beta)
            scale, dscale = _pnl_scale(bk, comp, beta, normalization)
            if not scale > 1e-12:
                return float("inf"), np.zeros_like(beta)
            u = q / scale
            du = dq / scale - (q / (scale * scale))[:, :, None] * dscale[None, None, :]
            value, slope = _huber(u, width)
            f = float(np.mean(np.sum(value, axis=1)))
            g = np.mean(np.sum(slope[:, :, None] * du, axis=1), axis=0)
            return f, g

        return fun

    beta, converged, history = _minimize_stages(objective, bk.identity_beta(), opts)
    scale, _ = _pnl_scale(bk, comp, beta, normalization)
    # B_k is quadratic in beta
    beta = beta / np.sqrt(scale)
    q, _ = _pnl_terms(bk, comp, beta)
    loss = float(np.sum(np.abs(q)))
    if not converged:
        logger.warning("PNL recalibration of component %d did not converge", k + 1)
    logger.debug("PNL component %d: loss/n=%.4g", k + 1, loss / comp.n)
    return BkFit(beta=beta, loss=loss, converged=converged, history=tuple(history))


def _as_ordering(ordering: Ordering | Sequence[int], d: int) -> Ordering:
    ordering = ordering if isinstance(ordering, Ordering) else Ordering(tuple(ordering))
    if len(ordering) != d:
        raise ValueError(f"ordering has {len(ordering)} entries for {d} variables")
    return ordering


def _gamma(gamma, d: int) -> tuple[float, ...]:
    if gamma is None:
        return (1.0,) * d
    if np.isscalar(gamma):
        gamma = [float(gamma)] * d
    values = tuple(float(g) for g in gamma)
    if len(values) != d or any(not g > 0 for g in values):
        raise ValueError(f"gamma must hold {d} positive weights, got {list(values)}")
    return values


def _score(
    samples, ordering: Ordering, gamma, opts: OrderOptions, kind: LossKind
) -> OrderingScore:
    x = check_samples(samples)
    d = x.shape[1]
    ordering = _as_ordering(ordering, d)
    weights = _gamma(gamma, d)
    permuted = x[:, list(ordering.order)]
    fit_one = fit_bk_anm if kind == "anm" else fit_bk_pnl
    try:
        spec = TriangularMapSpec.total_degree(d, opts.fit.degree, opts.fit.quadrature_order)
        fitted = fit_map(spec, permuted, opts.fit, columns=ordering.order)
        fits = [fit_one(fitted, k, permuted, opts) for k in range(d)]
    except FitError:
        raise
    except OtCausalError as e:
        raise FitError(f"{kind.upper()} score failed: {e}", ordering=ordering.order) from e

    score = OrderingScore(
        ordering=ordering,
        kind=kind,
        losses=tuple(f.loss for f in fits),
        gamma=weights,
        n=x.shape[0],
        betas=tuple(tuple(float(b) for b in f.beta) for f in fits),
        converged=tuple(f.converged for f in fits),
        map_converged=fitted.diagnostics.converged,
    )
    logger.info("%s loss of %s: %.6g", kind.upper(), ordering.label(), score.total)
    return score


def anm_loss(samples, ordering, gamma=None, opts: OrderOptions | None = None) -> OrderingScore:
    """γ-weighted ANM loss of ``ordering``.

    Raises:
        FitError: If the map or a recalibration fit fails, with the ordering attached
    """
    return _score(samples, ordering, gamma, opts or OrderOptions(), "anm")


def pnl_loss(samples, ordering, gamma=None, opts: OrderOptions | None = None) -> OrderingScore:
    """γ-weighted PNL loss of ``ordering``."""
    return _score(samples, ordering, gamma, opts or OrderOptions(), "pnl")


def select_ordering(
    cpdag: Pdag,
    samples,
    kind: LossKind = "anm",
    gamma=None,
    opts: OrderOptions | None = None,
    orderings: Sequence[Ordering] | None = None,
) -> OrderingSelection:
    """Score every possible ordering of ``cpdag`` and keep the best DAG.

    Ties are broken by the lexicographically smallest ordering.

    Args:
        cpdag: Essential graph whose equivalence class is searched
        samples: Raw samples ``(n, d)`` in canonical column order
        kind: ``"anm"`` or ``"pnl"``
        gamma: Component weights (scalar, sequence or ``None`` for ones)
        opts: Score options
        orderings: Explicit candidate orderings instead of the class's

    Raises:
        InconsistentGraphError: If the class is empty
    """
    opts = opts or OrderOptions()
    if kind not in ("anm", "pnl"):
        raise ValueError(f"unknown loss kind {kind!r}")
    candidates = list(orderings) if orderings is not None else possible_orderings(cpdag)
    if not candidates:
        raise InconsistentGraphError("the graph has no consistent DAG extension to score")
    logger.info("Scoring %d orderings with the %s loss", len(candidates), kind.upper())

    score_one = partial(_score, samples, gamma=gamma, opts=opts, kind=kind)
    scores = map_ordered(score_one, candidates, opts.workers)
    ranked = tuple(sorted(scores, key=lambda s: (s.total, s.ordering.order)))
    best = ranked[0].ordering
    dag = Dag.from_ordering(cpdag.skeleton(), best.order, cpdag.d)
    logger.info("Selected ordering %s", best.label())
    return OrderingSelection(dag=dag, ordering=best, scores=ranked, kind=kind)

