"""Causal structure discovery with monotone triangular transport maps."""

from ._version import __version__
from .config import Settings, load_settings
from .discovery import anm_loss, pnl_loss, run_pc_ot, select_ordering
from .errors import OtCausalError
from .graph import Dag, Ordering, Pdag, essential_graph, possible_orderings, structural_metrics
from .transport import TriangularMapSpec, fit_map

__all__ = [
    "Dag",
    "OtCausalError",
    "Ordering",
    "Pdag",
    "Settings",
    "TriangularMapSpec",
    "__version__",
    "anm_loss",
    "essential_graph",
    "fit_map",
    "load_settings",
    "pnl_loss",
    "possible_orderings",
    "run_pc_ot",
    "select_ordering",
    "structural_metrics",
]
