"""Hermite polynomials, Hermite functions and their tensor products.

Polynomials use the probabilists' convention ``He_s``; Hermite functions are
``psi_s(x) = He_s(x) * exp(-x**2 / 4)``. All table routines return values and
the first two derivatives stacked on a leading axis of length 3.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from ..errors import DimensionError


class AxisKind(str, Enum):
    POLYNOMIAL = "polynomial"
    FUNCTION = "function"
    CONSTANT = "constant"


def hermite_poly_table(max_degree: int, x) -> np.ndarray:
    """Evaluate ``He_0..He_max_degree`` and derivatives at ``x``.

    Args:
        max_degree: Highest degree to evaluate
        x: Scalar or array of points

    Returns:
        Array of shape ``(3, *x.shape, max_degree + 1)`` holding values, first
        and second derivatives.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((3, *x.shape, max_degree + 1))
    values = out[0]
    values[..., 0] = 1.0
    if max_degree >= 1:
        values[..., 1] = x
    for s in range(1, max_degree):
        values[..., s + 1] = x * values[..., s] - s * values[..., s - 1]
    for s in range(1, max_degree + 1):
        out[1][..., s] = s * values[..., s - 1]
    for s in range(2, max_degree + 1):
        out[2][..., s] = s * (s - 1) * values[..., s - 2]
    return out


def hermite_fn_table(max_degree: int, x) -> np.ndarray:
    """Evaluate ``psi_0..psi_max_degree`` and derivatives at ``x``.

    Same layout as :func:`hermite_poly_table`.
    """
    x = np.asarray(x, dtype=float)
    he, dhe, d2he = hermite_poly_table(max_degree, x)
    xs = x[..., None]
    envelope = np.exp(-0.25 * xs * xs)
    out = np.empty((3, *x.shape, max_degree + 1))
    out[0] = he * envelope
    out[1] = (dhe - 0.5 * xs * he) * envelope
    out[2] = (d2he - xs * dhe + (0.25 * xs * xs - 0.5) * he) * envelope
    return out


def hermite_poly(degree: int, x: float) -> tuple[float, float, float]:
    """Return ``He_degree(x)`` and its first two derivatives."""
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    table = hermite_poly_table(degree, x)
    return float(table[0, degree]), float(table[1, degree]), float(table[2, degree])


def hermite_fn(degree: int, x: float) -> tuple[float, float, float]:
    """Return ``psi_degree(x)`` and its first two derivatives."""
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    table = hermite_fn_table(degree, x)
    return float(table[0, degree]), float(table[1, degree]), float(table[2, degree])


@dataclass(frozen=True)
class BasisTerm:
    """A tensor-product basis element: one kind and one degree per input axis."""

    kinds: tuple[AxisKind, ...]
    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.kinds) != len(self.degrees):
            raise DimensionError(len(self.degrees), len(self.kinds), what="term kinds")
        if any(d < 0 for d in self.degrees):
            raise ValueError(f"degrees must be nonnegative, got {self.degrees}")
        for kind, degree in zip(self.kinds, self.degrees, strict=True):
            if kind is AxisKind.CONSTANT and degree != 0:
                raise ValueError("constant axes must have degree 0")

    @property
    def arity(self) -> int:
        return len(self.degrees)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def is_constant(self) -> bool:
        return all(d == 0 for d in self.degrees) and all(k is not AxisKind.FUNCTION for k in self.kinds)

    @classmethod
    def polynomial(cls, degrees: Sequence[int]) -> BasisTerm:
        return cls(tuple(AxisKind.POLYNOMIAL for _ in degrees), tuple(degrees))

    @classmethod
    def constant(cls, arity: int) -> BasisTerm:
        return cls(tuple(AxisKind.CONSTANT for _ in range(arity)), (0,) * arity)

    def to_dict(self) -> dict:
        return {"kinds": [k.value for k in self.kinds], "degrees": list(self.degrees)}

    @classmethod
    def from_dict(cls, data: dict) -> BasisTerm:
        return cls(tuple(AxisKind(k) for k in data["kinds"]), tuple(int(d) for d in data["degrees"]))


class TermSet:
    """A list of basis terms of equal arity, evaluated together.

    Attributes:
        terms: The basis terms, in coefficient order
        arity: Number of input axes
        max_degree: Largest per-axis degree appearing in any term
    """

    def __init__(self, terms: Sequence[BasisTerm], arity: int) -> None:
        for term in terms:
            if term.arity != arity:
                raise DimensionError(arity, term.arity, what="basis term")
        self.terms = tuple(terms)
        self.arity = arity
        self._degrees = np.array([t.degrees for t in terms], dtype=int).reshape(len(terms), arity)
        self._function = np.array(
            [[k is AxisKind.FUNCTION for k in t.kinds] for t in terms], dtype=bool
        ).reshape(len(terms), arity)
        self.max_degree = int(self._degrees.max()) if self._degrees.size else 0

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TermSet):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.arity, self.terms))

    def matrix(self, points, wrt: Sequence[int] = ()) -> np.ndarray:
        """Evaluate every term (or a partial derivative of it) at ``points``.

        Args:
            points: Array of shape ``(..., arity)``
            wrt: Axes to differentiate by; repeat an axis for a second derivative

        Returns:
            Array of shape ``(..., len(self))``
        """
        points = np.asarray(points, dtype=float)
        if points.shape[-1:] != (self.arity,):
            raise DimensionError(self.arity, points.shape[-1] if points.ndim else 0, what="points")
        orders = np.bincount(np.asarray(wrt, dtype=int), minlength=self.arity) if wrt else np.zeros(self.arity, dtype=int)
        if orders.size > self.arity:
            raise DimensionError(self.arity, orders.size, what="derivative axis")
        if np.any(orders > 2):
            raise ValueError("at most second derivatives per axis are supported")

        batch = points.shape[:-1]
        out = np.ones((*batch, len(self.terms)))
        for axis in range(self.arity):
            order = int(orders[axis])
            degrees = self._degrees[:, axis]
            x = points[..., axis]
            poly = hermite_poly_table(self.max_degree, x)[order][..., degrees]
            if self._function[:, axis].any():
                fn = hermite_fn_table(self.max_degree, x)[order][..., degrees]
                out *= np.where(self._function[:, axis], fn, poly)
            else:
                out *= poly
        return out


def term_eval(term: BasisTerm, point: Sequence[float]) -> tuple[float, np.ndarray, np.ndarray]:
    """Evaluate one basis term with its gradient and table of second partials.

    Args:
        term: The basis term
        point: Evaluation point, one coordinate per term axis

    Returns:
        ``(value, grad, mixed2)`` with ``grad`` of shape ``(arity,)`` and
        ``mixed2`` of shape ``(arity, arity)``

    Raises:
        DimensionError: If the point length differs from the term arity
    """
    x = np.asarray(point, dtype=float)
    if x.shape != (term.arity,):
        raise DimensionError(term.arity, int(x.size), what="point")
    terms = TermSet([term], term.arity)
    value = float(terms.matrix(x)[0])
    grad = np.array([terms.matrix(x, (i,))[0] for i in range(term.arity)])
    mixed2 = np.empty((term.arity, term.arity))
    for i, j in product(range(term.arity), repeat=2):
        mixed2[i, j] = terms.matrix(x, (i, j))[0]
    return value, grad, mixed2


def multi_indices(arity: int, max_total: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``arity`` with total degree <= ``max_total``.

    Ordered by total degree, then lexicographically descending on the first
    axis so ``(1, 0)`` precedes ``(0, 1)``.
    """
    if arity == 0:
        return [()]
    indices = [idx for idx in product(range(max_total + 1), repeat=arity) if sum(idx) <= max_total]
    return sorted(indices, key=lambda idx: (sum(idx), tuple(-i for i in idx)))
