"""Evaluation and x-derivatives of a parameterized triangular map.

All public functions accept one point of shape ``(d,)`` or a batch of shape
``(n, d)`` and return arrays shaped accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import DegenerateMapError, DimensionError
from .spec import TriangularMapSpec

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class ComponentEvaluator:
    """Basis matrices of one map component at a fixed batch of points.

    Matrices are computed lazily and cached per derivative pattern, so the
    same evaluator can be reused for many coefficient vectors (the fit) or for
    many derivative patterns (the CI score).

    Args:
        spec: The map layout
        k: Component index (0-based)
        points: Array of shape ``(n, k + 1)`` or wider; extra columns are ignored
    """

    def __init__(self, spec: TriangularMapSpec, k: int, points: np.ndarray) -> None:
        self.spec = spec
        self.k = k
        self.layout = spec.components[k]
        self.x = np.ascontiguousarray(points[:, : k + 1], dtype=float)
        self.t, self.w = spec.rule.scaled(self.x[:, k])
        self._cache: dict[tuple, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @cached_property
    def quad_points(self) -> np.ndarray:
        """Points ``(x_0..x_{k-1}, t_q)`` of shape ``(n, Q, k + 1)``."""
        q = self.t.shape[1]
        pts = np.repeat(self.x[:, None, :], q, axis=1)
        pts[..., self.k] = self.t
        return pts

    def c(self, *wrt: int) -> np.ndarray:
        """``c`` basis (or its x-derivative) at the points, shape ``(n, mc)``."""
        key = ("c", *sorted(wrt))
        if key not in self._cache:
            if any(axis >= self.k for axis in wrt):
                self._cache[key] = np.zeros((self.n, len(self.layout.c_terms)))
            else:
                self._cache[key] = self.layout.c_terms.matrix(self.x[:, : self.k], wrt)
        return self._cache[key]

    def hq(self, *wrt: int) -> np.ndarray:
        """``h`` basis at the quadrature points, shape ``(n, Q, mh)``."""
        key = ("hq", *sorted(wrt))
        if key not in self._cache:
            self._cache[key] = self.layout.h_terms.matrix(self.quad_points, wrt)
        return self._cache[key]

    def hx(self, *wrt: int) -> np.ndarray:
        """``h`` basis at the points themselves, shape ``(n, mh)``."""
        key = ("hx", *sorted(wrt))
        if key not in self._cache:
            self._cache[key] = self.layout.h_terms.matrix(self.x, wrt)
        return self._cache[key]

    def split(self, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return alpha[self.layout.c_slice], alpha[self.layout.h_slice]

    def value(self, alpha: np.ndarray) -> np.ndarray:
        """``S_k`` at every point."""
        a, b = self.split(alpha)
        hq = self.hq() @ b
        return self.c() @ a + np.sum(self.w * hq * hq, axis=1)

    def diagonal_root(self, alpha: np.ndarray) -> np.ndarray:
        """``h_k`` at every point; the diagonal partial is its square."""
        _, b = self.split(alpha)
        return self.hx() @ b

    def jet(self, alpha: np.ndarray, order: int = 2) -> ComponentJet:
        """Value, gradient and Hessian in x of ``S_k`` plus the Hessian of ``log h_k**2``."""
        a, b = self.split(alpha)
        k = self.k
        arity = k + 1
        n = self.n
        w = self.w

        hq = self.hq() @ b
        h = self.hx() @ b
        value = self.c() @ a + np.sum(w * hq * hq, axis=1)

        grad = np.zeros((n, arity))
        hq_d = [self.hq(i) @ b for i in range(k)]
        hx_d = [self.hx(i) @ b for i in range(arity)]
        for i in range(k):
            grad[:, i] = self.c(i) @ a + np.sum(w * 2.0 * hq * hq_d[i], axis=1)
        grad[:, k] = h * h

        hess = np.zeros((n, arity, arity))
        log_hess = np.zeros((n, arity, arity))
        if order >= 2:
            for i in range(arity):
                for j in range(i, arity):
                    if j < k:
                        hq_ij = self.hq(i, j) @ b
                        entry = self.c(i, j) @ a + np.sum(
                            w * 2.0 * (hq_d[i] * hq_d[j] + hq * hq_ij), axis=1
                        )
                    else:
                        # derivative in the last axis undoes the integral
                        entry = 2.0 * h * hx_d[i]
                    hess[:, i, j] = hess[:, j, i] = entry
                    hx_ij = self.hx(i, j) @ b
                    with np.errstate(divide="ignore", invalid="ignore"):
                        g = 2.0 * (hx_ij / h - hx_d[i] * hx_d[j] / (h * h))
                    log_hess[:, i, j] = log_hess[:, j, i] = g
        return ComponentJet(value=value, root=h, grad=grad, hess=hess, log_diag_hess=log_hess)


@dataclass(frozen=True)
class ComponentJet:
    """x-derivatives of one component over a batch of points.

    Attributes:
        value: ``S_k``, shape ``(n,)``
        root: ``h_k`` at the points, shape ``(n,)``
        grad: ``dS_k/dx_j`` for ``j <= k``, shape ``(n, k + 1)``
        hess: ``d2 S_k / dx_i dx_j``, shape ``(n, k + 1, k + 1)``
        log_diag_hess: ``d2 log(h_k**2) / dx_i dx_j``, shape ``(n, k + 1, k + 1)``
    """

    value: np.ndarray
    root: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    log_diag_hess: np.ndarray


@dataclass(frozen=True)
class MapPartials:
    """Derivatives of all map components.

    Attributes:
        dkk: Diagonal partials ``dS_k/dx_k``, shape ``(..., d)``
        jacobian: Lower-triangular ``dS_k/dx_l``, shape ``(..., d, d)``
        hessian: ``d2 S_k / dx_i dx_j``, shape ``(..., d, d, d)`` indexed ``[k, i, j]``
    """

    dkk: np.ndarray
    jacobian: np.ndarray
    hessian: np.ndarray

    @property
    def mixed(self) -> np.ndarray:
        """Off-diagonal first partials (strictly lower triangle of the Jacobian)."""
        return np.tril(self.jacobian, k=-1)


def as_batch(x, dimension: int) -> tuple[np.ndarray, bool]:
    """Return ``x`` as an ``(n, dimension)`` array and whether it was a single point."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise DimensionError(dimension, arr.shape[-1] if arr.ndim else 0, what="point")
    return arr, single


def map_eval(spec: TriangularMapSpec, alpha, x) -> np.ndarray:
    """Evaluate ``S_alpha`` at ``x``.

    Args:
        spec: Map layout
        alpha: Coefficient vector
        x: One point ``(d,)`` or a batch ``(n, d)``

    Returns:
        The image, same shape as ``x``
    """
    alpha = spec.check_alpha(alpha)
    batch, single = as_batch(x, spec.dimension)
    out = np.column_stack(
        [ComponentEvaluator(spec, k, batch).value(alpha) for k in range(spec.dimension)]
    )
    return out[0] if single else out


def partials(spec: TriangularMapSpec, alpha, x) -> MapPartials:
    """First and second x-partials of every map component.

    The diagonal ``dS_k/dx_k`` is the square of ``h_k`` and needs no
    quadrature; off-diagonal first and second partials integrate the
    x-derivatives of ``h_k**2``.
    """
    alpha = spec.check_alpha(alpha)
    batch, single = as_batch(x, spec.dimension)
    d = spec.dimension
    n = batch.shape[0]
    jac = np.zeros((n, d, d))
    hess = np.zeros((n, d, d, d))
    for k in range(d):
        jet = ComponentEvaluator(spec, k, batch).jet(alpha)
        jac[:, k, : k + 1] = jet.grad
        hess[:, k, : k + 1, : k + 1] = jet.hess
    dkk = np.diagonal(jac, axis1=1, axis2=2).copy()
    if single:
        return MapPartials(dkk=dkk[0], jacobian=jac[0], hessian=hess[0])
    return MapPartials(dkk=dkk, jacobian=jac, hessian=hess)


def log_pullback(spec: TriangularMapSpec, alpha, x) -> np.ndarray | float:
    """Log of the pullback of the standard Gaussian through ``S_alpha``.

    ``sum_k log phi(S_k(x)) + log dS_k/dx_k(x)``; the determinant of the
    triangular Jacobian is the product of the diagonal partials.

    Raises:
        DegenerateMapError: If a diagonal partial is not positive at some point
    """
    alpha = spec.check_alpha(alpha)
    batch, single = as_batch(x, spec.dimension)
    total = np.zeros(batch.shape[0])
    for k in range(spec.dimension):
        ev = ComponentEvaluator(spec, k, batch)
        s = ev.value(alpha)
        h = ev.diagonal_root(alpha)
        diag = h * h
        bad = np.flatnonzero(~(diag > 0))
        if bad.size:
            raise DegenerateMapError(sample_index=int(bad[0]), component=k)
        total += -0.5 * s * s - LOG_SQRT_2PI + np.log(diag)
    return float(total[0]) if single else total
