from .order_scores import (
    BkFit,
    BkSpec,
    OrderingScore,
    OrderingSelection,
    anm_component_loss,
    anm_loss,
    fit_bk_anm,
    fit_bk_pnl,
    ordering_table,
    pnl_component_loss,
    pnl_loss,
    select_ordering,
)
from .pc_ot import CiTester, DSeparationOracle, OmegaTester, PcOtResult, run_pc_ot
from .trace import TraceEntry, TraceRecorder

__all__ = [
    "BkFit",
    "BkSpec",
    "CiTester",
    "DSeparationOracle",
    "OmegaTester",
    "OrderingScore",
    "OrderingSelection",
    "PcOtResult",
    "TraceEntry",
    "TraceRecorder",
    "anm_component_loss",
    "anm_loss",
    "fit_bk_anm",
    "fit_bk_pnl",
    "ordering_table",
    "pnl_component_loss",
    "pnl_loss",
    "run_pc_ot",
    "select_ordering",
]
