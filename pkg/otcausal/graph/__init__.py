from .dsep import d_separated, reachable
from .mec import compatible_ordering, dag_from_ordering, enumerate_mec, possible_orderings
from .metrics import StructuralMetrics, structural_metrics
from .orient import essential_graph, meek_closure, orient_v_structures
from .serializers import (
    deserialize_graph,
    from_json,
    ordering_from_string,
    parse_edges,
    serialize_graph,
    to_dot,
    to_json,
)
from .types import Dag, Edge, Ordering, Pdag, SepSetTable, edge_key

__all__ = [
    "Dag",
    "Edge",
    "Ordering",
    "Pdag",
    "SepSetTable",
    "StructuralMetrics",
    "compatible_ordering",
    "d_separated",
    "dag_from_ordering",
    "deserialize_graph",
    "edge_key",
    "enumerate_mec",
    "essential_graph",
    "from_json",
    "meek_closure",
    "ordering_from_string",
    "orient_v_structures",
    "parse_edges",
    "possible_orderings",
    "reachable",
    "serialize_graph",
    "structural_metrics",
    "to_dot",
    "to_json",
]
