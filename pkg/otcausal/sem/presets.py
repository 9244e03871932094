"""Ready-made structural equation models.

``pcot6``, ``anm6`` and ``vstruct3`` are the non-Gaussian benchmark models
used for structure recovery and ordering selection; ``sachs5`` is a
synthetic additive model on the five-protein signaling subnetwork.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from ..graph import Dag, parse_edges
from .model import ModelClass, NodeAssignment, SemSpec
from .noise import NoiseSpec

N = NoiseSpec.gaussian
SACHS_COLUMNS = ("Plcg", "PIP3", "PIP2", "PKC", "Akt")


def _half_bernoulli() -> NoiseSpec:
    return NoiseSpec.bernoulli(0.5)


def _shifted_gumbel(scale: float, shift: float, divisor: float) -> NoiseSpec:
    """``(Gumbel(0, scale) - shift) / divisor``."""
    return NoiseSpec.gumbel(0.0, scale).affine(shift=-shift / divisor, scale=1.0 / divisor)


def pcot6() -> SemSpec:
    """Six-variable non-Gaussian additive model for PC-OT."""
    dag = parse_edges("1->3 2->3 1->5 4->5 4->6 5->6", d=6)
    nodes = (
        NodeAssignment.of("0", (N() * N()).affine(scale=0.2)),
        NodeAssignment.of("0", _shifted_gumbel(0.7, 2.5, 2.5)),
        NodeAssignment.of("POWER(X1, 2) + X2", (N() * NoiseSpec.exponential(1.0)).affine(scale=1.0 / 8.0)),
        NodeAssignment.of("0", (_half_bernoulli() * NoiseSpec.exponential(1.0)).affine(shift=-1.5, scale=0.5)),
        NodeAssignment.of(
            "0.5 * POWER(X1, 2) - 0.5 * POWER(X4, 2) + X1 * X4",
            (_half_bernoulli() * NoiseSpec.gamma(2.0, 3.0)).affine(shift=-2.0, scale=1.0 / 12.0),
        ),
        NodeAssignment.of("POWER(X4, 3) - X5", NoiseSpec.gumbel(0.0, 0.5).affine(shift=-1.5)),
    )
    return SemSpec(dag, nodes, ModelClass.ANM)


def anm6() -> SemSpec:
    """Six-variable additive model whose class holds four DAGs."""
    dag = parse_edges("1->2 1->3 2->4 3->6 4->5 5->6 1->5", d=6)
    log_chi = N().power(2).affine(shift=1.0).log()
    nodes = (
        NodeAssignment.of("0", N().power(2).affine(scale=0.2)),
        NodeAssignment.of("0.5 * POWER(X1, 2)", N(-2.5, 1.0).affine(scale=0.5)),
        NodeAssignment.of("LN(POWER(X1, 2))", log_chi),
        NodeAssignment.of("2 * X2 * (X2 + 1)", N().power(2).affine(scale=0.3)),
        NodeAssignment.of("0.5 * POWER(X1, 2) - 0.5 * POWER(X4, 2) + X1 * X4", log_chi),
        NodeAssignment.of("0.25 * POWER(X3, 2) - X5", N()),
    )
    return SemSpec(dag, nodes, ModelClass.ANM)


def vstruct3() -> SemSpec:
    """Three-variable v-structure ``1 -> 3 <- 2`` with heavy-tailed and atomic noises."""
    dag = parse_edges("1->3 2->3", d=3)
    root = math.sqrt(4.0 / 3.0)
    u1 = NoiseSpec.power_law(4.0).affine(shift=-1.5 * root, scale=root).truncated(1000.0)
    nodes = (
        NodeAssignment.of("0", u1.affine(scale=1.0 / 450.0)),
        NodeAssignment.of("0", _shifted_gumbel(0.7, 2.5, 2.5)),
        NodeAssignment.of(
            "(POWER(X2, 3) + LN(ABS(X2) * POWER(X1, 2))) / 15",
            _half_bernoulli() * NoiseSpec.exponential(0.5),
        ),
    )
    return SemSpec(dag, nodes, ModelClass.ANM)


def linear_gaussian(rho: float = 0.5) -> SemSpec:
    """Standard bivariate Gaussian with correlation ``rho``."""
    if not -1.0 < rho < 1.0:
        raise ConfigError(f"rho must lie in (-1, 1), got {rho}")
    if rho == 0.0:
        return SemSpec(Dag(2), (NodeAssignment.of("0", N()), NodeAssignment.of("0", N())), ModelClass.ANM)
    nodes = (
        NodeAssignment.of("0", N()),
        NodeAssignment.of(f"{rho!r} * X1", N(0.0, math.sqrt(1.0 - rho * rho))),
    )
    return SemSpec(parse_edges("1->2", d=2), nodes, ModelClass.ANM)


def linear_gaussian_sem(d: int = 4, noise: str = "gaussian", seed: int = 0, edge_prob: float = 0.5) -> SemSpec:
    """Random linear additive model on ``d`` variables in the order ``1..d``.

    Edge weights have magnitude in [0.5, 1.5] with random sign. ``noise``
    selects standard Gaussian or centred Gumbel(0, 1) noise.
    """
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    if noise not in ("gaussian", "gumbel"):
        raise ConfigError(f"noise must be 'gaussian' or 'gumbel', got {noise!r}")
    rng = np.random.default_rng(seed)
    edges = []
    nodes = []
    for k in range(d):
        terms = []
        for j in range(k):
            if rng.random() < edge_prob:
                weight = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
                terms.append(f"{weight:.6g} * X{j + 1}")
                edges.append((j, k))
        u = N() if noise == "gaussian" else NoiseSpec.gumbel().affine(shift=-np.euler_gamma)
        nodes.append(NodeAssignment.of(" + ".join(terms) if terms else "0", u))
    return SemSpec(Dag(d, frozenset(edges)), tuple(nodes), ModelClass.ANM)


def pnl2() -> SemSpec:
    """Post-nonlinear pair ``X2 = (0.3 X1 + U2)^3``."""
    nodes = (
        NodeAssignment.of("0", N(), post="V"),
        NodeAssignment.of("0.3 * X1", N(), post="POWER(V, 3)"),
    )
    return SemSpec(parse_edges("1->2", d=2), nodes, ModelClass.PNL)


def sachs_graph() -> Dag:
    """Signaling subnetwork Plcg, PIP3, PIP2, PKC, Akt."""
    return parse_edges("1->2 1->3 1->4 2->3 2->5 3->4 4->5", d=5)


def sachs5() -> SemSpec:
    """Synthetic non-Gaussian additive model on :func:`sachs_graph`."""
    nodes = (
        NodeAssignment.of("0", NoiseSpec.gumbel().affine(shift=-np.euler_gamma)),
        NodeAssignment.of("0.5 * POWER(X1, 2)", NoiseSpec.exponential(1.0).affine(shift=-1.0)),
        NodeAssignment.of("0.8 * X1 - 0.4 * POWER(X2, 2)", NoiseSpec.gumbel(0.0, 0.5)),
        NodeAssignment.of("0.5 * X3 - 0.3 * POWER(X1, 2)", (N() * NoiseSpec.exponential(1.0)).affine(scale=0.5)),
        NodeAssignment.of("X2 + 0.5 * X4", NoiseSpec.gumbel(0.0, 0.7)),
    )
    return SemSpec(sachs_graph(), nodes, ModelClass.ANM, SACHS_COLUMNS)


PRESETS = {
    "pcot6": pcot6,
    "anm6": anm6,
    "vstruct3": vstruct3,
    "linear_gaussian": linear_gaussian,
    "linear_gaussian_sem": linear_gaussian_sem,
    "pnl2": pnl2,
    "sachs5": sachs5,
}


def preset(name: str, **kwargs) -> SemSpec:
    """Build a preset model by name.

    Raises:
        ConfigError: If the name is unknown or a keyword does not apply
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    try:
        return factory(**kwargs)
    except TypeError as e:
        raise ConfigError(f"bad arguments for preset {name!r}: {e}") from e
