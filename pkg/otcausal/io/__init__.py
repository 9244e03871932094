from .dataset import Dataset, load_csv, save_csv
from .experiment import ExperimentPlan, ExperimentResult, run_experiment, write_outputs
from .results import (
    ResultTable,
    canonical_json,
    dot_comment,
    fingerprint,
    read_json,
    run_meta,
    summarize,
    write_json,
)

__all__ = [
    "Dataset",
    "ExperimentPlan",
    "ExperimentResult",
    "ResultTable",
    "canonical_json",
    "dot_comment",
    "fingerprint",
    "load_csv",
    "read_json",
    "run_experiment",
    "run_meta",
    "save_csv",
    "summarize",
    "write_json",
    "write_outputs",
]
