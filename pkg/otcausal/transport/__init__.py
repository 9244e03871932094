from .brenier import MonotoneStepMap, brenier_1d
from .fit import (
    FitDiagnostics,
    FittedMap,
    check_samples,
    fit_map,
    history_recorder,
    nll_objective,
    score_matrix,
)
from .spec import ComponentLayout, TriangularMapSpec
from .triangular import (
    ComponentEvaluator,
    ComponentJet,
    MapPartials,
    log_pullback,
    map_eval,
    partials,
)

__all__ = [
    "ComponentEvaluator",
    "ComponentJet",
    "ComponentLayout",
    "FitDiagnostics",
    "FittedMap",
    "MapPartials",
    "MonotoneStepMap",
    "TriangularMapSpec",
    "brenier_1d",
    "check_samples",
    "fit_map",
    "history_recorder",
    "log_pullback",
    "map_eval",
    "nll_objective",
    "partials",
    "score_matrix",
]
