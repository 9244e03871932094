"""Basis layout of a monotone lower-triangular map.

Component ``k`` (0-based) of the map is

    S_k(x) = c_k(x_0..x_{k-1}) + integral_0^{x_k} h_k(x_0..x_{k-1}, t)**2 dt

where ``c_k`` and ``h_k`` are linear combinations of the basis terms stored
here. The coefficient vector is laid out component by component, ``c`` block
first, each block contiguous.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from ..basis import AxisKind, BasisTerm, QuadratureRule, TermSet, gauss_legendre, multi_indices
from ..errors import DimensionError

Part = Literal["c", "h"]


@dataclass(frozen=True)
class ComponentLayout:
    """Terms and coefficient slots of one map component."""

    index: int
    c_terms: TermSet
    h_terms: TermSet
    c_slice: slice
    h_slice: slice

    @property
    def block(self) -> slice:
        return slice(self.c_slice.start, self.h_slice.stop)

    @property
    def n_coefficients(self) -> int:
        return len(self.c_terms) + len(self.h_terms)

    @property
    def constant_h(self) -> int:
        """Position of the constant term inside the ``h`` block."""
        for i, term in enumerate(self.h_terms.terms):
            if term.is_constant:
                return i
        raise ValueError(f"component {self.index + 1} has no constant h-term")


@dataclass(frozen=True)
class TriangularMapSpec:
    """Basis-term layout of a ``dimension``-dimensional triangular map."""

    dimension: int
    components: tuple[ComponentLayout, ...]
    quadrature_order: int
    degree: int | None = None
    _rule: QuadratureRule = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"map dimension must be >= 1, got {self.dimension}")
        if len(self.components) != self.dimension:
            raise DimensionError(self.dimension, len(self.components), what="component list")
        stop = 0
        for k, comp in enumerate(self.components):
            if comp.c_terms.arity != k or comp.h_terms.arity != k + 1:
                raise DimensionError(k + 1, comp.h_terms.arity, what=f"component {k + 1} terms")
            if comp.c_slice.start != stop or comp.h_slice.start != comp.c_slice.stop:
                raise ValueError("coefficient slots must be disjoint and contiguous")
            if not any(t.is_constant for t in comp.h_terms.terms):
                raise ValueError(f"h-terms of component {k + 1} must include the constant term")
            stop = comp.h_slice.stop
        object.__setattr__(self, "_rule", gauss_legendre(self.quadrature_order))

    @classmethod
    def from_terms(
        cls,
        c_terms: Sequence[Sequence[BasisTerm]],
        h_terms: Sequence[Sequence[BasisTerm]],
        quadrature_order: int | None = None,
        degree: int | None = None,
    ) -> TriangularMapSpec:
        """Build a spec from explicit per-component term lists.

        Args:
            c_terms: For each component ``k``, terms of arity ``k``
            h_terms: For each component ``k``, terms of arity ``k + 1``; each list
                must contain the constant term
            quadrature_order: Gauss–Legendre nodes, defaults to max degree + 3
            degree: Nominal total degree, recorded for reporting

        Returns:
            The spec with a contiguous coefficient layout
        """
        if len(c_terms) != len(h_terms):
            raise DimensionError(len(h_terms), len(c_terms), what="c-term list")
        components = []
        offset = 0
        max_degree = 0
        for k, (cs, hs) in enumerate(zip(c_terms, h_terms, strict=True)):
            c_set = TermSet(cs, k)
            h_set = TermSet(hs, k + 1)
            c_slice = slice(offset, offset + len(c_set))
            h_slice = slice(c_slice.stop, c_slice.stop + len(h_set))
            offset = h_slice.stop
            max_degree = max(max_degree, c_set.max_degree, h_set.max_degree)
            components.append(ComponentLayout(k, c_set, h_set, c_slice, h_slice))
        order = quadrature_order if quadrature_order is not None else max_degree + 3
        return cls(len(components), tuple(components), order, degree)

    @classmethod
    def total_degree(
        cls, dimension: int, degree: int = 2, quadrature_order: int | None = None
    ) -> TriangularMapSpec:
        """Standard spec: all terms of total degree <= ``degree``.

        ``c_k`` uses Hermite polynomials in ``x_0..x_{k-1}`` (constant included);
        ``h_k`` uses Hermite polynomials in the leading axes times a Hermite
        function in the last axis, plus the constant term.
        """
        if degree < 0:
            raise ValueError(f"degree must be nonnegative, got {degree}")
        c_terms = []
        h_terms = []
        for k in range(dimension):
            c_terms.append([BasisTerm.polynomial(idx) for idx in multi_indices(k, degree)])
            kinds = (AxisKind.POLYNOMIAL,) * k + (AxisKind.FUNCTION,)
            hs = [BasisTerm.constant(k + 1)]
            hs.extend(BasisTerm(kinds, idx) for idx in multi_indices(k + 1, degree))
            h_terms.append(hs)
        order = quadrature_order if quadrature_order is not None else degree + 3
        return cls.from_terms(c_terms, h_terms, quadrature_order=order, degree=degree)

    @property
    def rule(self) -> QuadratureRule:
        return self._rule

    @property
    def n_coefficients(self) -> int:
        return self.components[-1].h_slice.stop

    def identity_alpha(self) -> np.ndarray:
        """Coefficients of the identity map: ``c = 0`` and ``h = 1``."""
        alpha = np.zeros(self.n_coefficients)
        for comp in self.components:
            alpha[comp.h_slice.start + comp.constant_h] = 1.0
        return alpha

    def coefficient_index(self, k: int, part: Part, term: BasisTerm) -> int:
        """Slot of ``term`` in the ``c`` or ``h`` block of component ``k``."""
        comp = self.components[k]
        terms, block = (comp.c_terms, comp.c_slice) if part == "c" else (comp.h_terms, comp.h_slice)
        for i, candidate in enumerate(terms.terms):
            if candidate == term:
                return block.start + i
        raise KeyError(f"term {term} not in the {part}-block of component {k + 1}")

    def check_alpha(self, alpha) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        if alpha.shape != (self.n_coefficients,):
            raise DimensionError(self.n_coefficients, int(alpha.size), what="coefficient vector")
        return alpha

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimension": self.dimension,
            "degree": self.degree,
            "quadrature_order": self.quadrature_order,
            "components": [
                {
                    "c_terms": [t.to_dict() for t in comp.c_terms.terms],
                    "h_terms": [t.to_dict() for t in comp.h_terms.terms],
                }
                for comp in self.components
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TriangularMapSpec:
        comps = data["components"]
        return cls.from_terms(
            [[BasisTerm.from_dict(t) for t in c["c_terms"]] for c in comps],
            [[BasisTerm.from_dict(t) for t in c["h_terms"]] for c in comps],
            quadrature_order=data.get("quadrature_order"),
            degree=data.get("degree"),
        )
