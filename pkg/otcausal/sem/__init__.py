from .expr import Mechanism
from .model import ModelClass, NodeAssignment, SemSpec, sample
from .noise import NoiseSpec
from .presets import (
    PRESETS,
    SACHS_COLUMNS,
    anm6,
    linear_gaussian,
    linear_gaussian_sem,
    pcot6,
    pnl2,
    preset,
    sachs5,
    sachs_graph,
    vstruct3,
)

__all__ = [
    "PRESETS",
    "SACHS_COLUMNS",
    "Mechanism",
    "ModelClass",
    "NodeAssignment",
    "NoiseSpec",
    "SemSpec",
    "anm6",
    "linear_gaussian",
    "linear_gaussian_sem",
    "pcot6",
    "pnl2",
    "preset",
    "sachs5",
    "sachs_graph",
    "vstruct3",
    "sample",
]
