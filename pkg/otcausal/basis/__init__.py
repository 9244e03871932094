from .hermite import (
    AxisKind,
    BasisTerm,
    TermSet,
    hermite_fn,
    hermite_fn_table,
    hermite_poly,
    hermite_poly_table,
    multi_indices,
    term_eval,
)
from .quadrature import QuadratureRule, gauss_legendre

__all__ = [
    "AxisKind",
    "BasisTerm",
    "QuadratureRule",
    "TermSet",
    "gauss_legendre",
    "hermite_fn",
    "hermite_fn_table",
    "hermite_poly",
    "hermite_poly_table",
    "multi_indices",
    "term_eval",
]
