from .engine import (
    FisherEstimate,
    OmegaReport,
    fisher_information,
    log_density_mixed_second,
    mixed_second_with_gradient,
    omega_gradient,
    omega_report,
    omega_score,
    omega_sigma,
    quadratic_form,
)

__all__ = [
    "FisherEstimate",
    "OmegaReport",
    "fisher_information",
    "log_density_mixed_second",
    "mixed_second_with_gradient",
    "omega_gradient",
    "omega_report",
    "omega_score",
    "omega_sigma",
    "quadratic_form",
]
