"""Noise distributions of structural equation models.

A :class:`NoiseSpec` is a small expression tree: base families drawn with
``scipy.stats`` and combinators (product, power, log, affine) applied to
independent draws of their children. An optional ``upper`` bound truncates
the final value by rejection.

Conventions: ``gumbel(loc, scale)`` is the right-skewed location-scale
Gumbel, ``exponential(rate)``, ``gamma(shape, scale)``, and
``power_law(alpha, xm)`` is the Pareto law with tail index ``alpha`` and
minimum ``xm``, sampled by inverting its c.d.f.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import stats

from ..errors import ConfigError

BASE_FAMILIES = ("gaussian", "gumbel", "exponential", "gamma", "bernoulli", "power_law")
COMBINATORS = ("product", "power", "log", "affine")

_REQUIRED = {
    "gaussian": ("loc", "scale"),
    "gumbel": ("loc", "scale"),
    "exponential": ("rate",),
    "gamma": ("shape", "scale"),
    "bernoulli": ("p",),
    "power_law": ("alpha", "xm"),
    "product": (),
    "power": ("exponent",),
    "log": (),
    "affine": ("shift", "scale"),
}

MAX_REJECTION_ROUNDS = 1000


@dataclass(frozen=True)
class NoiseSpec:
    """A noise distribution.

    Attributes:
        family: Base family or combinator name
        params: Family parameters
        children: Operands of a combinator
        upper: Optional truncation bound (values above are redrawn)
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    children: tuple[NoiseSpec, ...] = ()
    upper: float | None = None

    def __post_init__(self) -> None:
        if self.family not in _REQUIRED:
            raise ConfigError(f"unknown noise family {self.family!r}")
        missing = [p for p in _REQUIRED[self.family] if p not in self.params]
        if missing:
            raise ConfigError(f"noise family {self.family!r} needs parameters {missing}")
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})
        p = self.params
        if self.family in ("gaussian", "gumbel", "gamma") and p["scale"] <= 0:
            raise ConfigError(f"{self.family} scale must be positive")
        if self.family == "gamma" and p["shape"] <= 0:
            raise ConfigError("gamma shape must be positive")
        if self.family == "exponential" and p["rate"] <= 0:
            raise ConfigError("exponential rate must be positive")
        if self.family == "bernoulli" and not 0.0 <= p["p"] <= 1.0:
            raise ConfigError("bernoulli p must lie in [0, 1]")
        if self.family == "power_law" and (p["alpha"] <= 0 or p["xm"] <= 0):
            raise ConfigError("power_law alpha and xm must be positive")
        if self.family in BASE_FAMILIES and self.children:
            raise ConfigError(f"base family {self.family!r} takes no operands")
        if self.family == "product" and len(self.children) < 2:
            raise ConfigError("product needs at least two operands")
        if self.family in ("power", "log", "affine") and len(self.children) != 1:
            raise ConfigError(f"{self.family} needs exactly one operand")

    @classmethod
    def gaussian(cls, loc: float = 0.0, scale: float = 1.0) -> NoiseSpec:
        return cls("gaussian", {"loc": loc, "scale": scale})

    @classmethod
    def gumbel(cls, loc: float = 0.0, scale: float = 1.0) -> NoiseSpec:
        return cls("gumbel", {"loc": loc, "scale": scale})

    @classmethod
    def exponential(cls, rate: float = 1.0) -> NoiseSpec:
        return cls("exponential", {"rate": rate})

    @classmethod
    def gamma(cls, shape: float, scale: float = 1.0) -> NoiseSpec:
        return cls("gamma", {"shape": shape, "scale": scale})

    @classmethod
    def bernoulli(cls, p: float = 0.5) -> NoiseSpec:
        return cls("bernoulli", {"p": p})

    @classmethod
    def power_law(cls, alpha: float, xm: float = 1.0) -> NoiseSpec:
        return cls("power_law", {"alpha": alpha, "xm": xm})

    def __mul__(self, other: NoiseSpec) -> NoiseSpec:
        return NoiseSpec("product", children=(self, other))

    def power(self, exponent: float) -> NoiseSpec:
        return NoiseSpec("power", {"exponent": exponent}, (self,))

    def log(self) -> NoiseSpec:
        return NoiseSpec("log", children=(self,))

    def affine(self, shift: float = 0.0, scale: float = 1.0) -> NoiseSpec:
        """``scale * X + shift``."""
        return NoiseSpec("affine", {"shift": shift, "scale": scale}, (self,))

    def truncated(self, upper: float) -> NoiseSpec:
        return NoiseSpec(self.family, self.params, self.children, upper)

    def _draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        p = self.params
        match self.family:
            case "gaussian":
                return stats.norm.rvs(loc=p["loc"], scale=p["scale"], size=n, random_state=rng)
            case "gumbel":
                return stats.gumbel_r.rvs(loc=p["loc"], scale=p["scale"], size=n, random_state=rng)
            case "exponential":
                return stats.expon.rvs(scale=1.0 / p["rate"], size=n, random_state=rng)
            case "gamma":
                return stats.gamma.rvs(p["shape"], scale=p["scale"], size=n, random_state=rng)
            case "bernoulli":
                return stats.bernoulli.rvs(p["p"], size=n, random_state=rng).astype(float)
            case "power_law":
                return stats.pareto.ppf(rng.random(n), p["alpha"], scale=p["xm"])
            case "product":
                out = np.ones(n)
                for child in self.children:
                    out = out * child.sample(n, rng)
                return out
            case "power":
                return np.power(self.children[0].sample(n, rng), p["exponent"])
            case "log":
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.log(self.children[0].sample(n, rng))
            case "affine":
                return p["scale"] * self.children[0].sample(n, rng) + p["shift"]
        raise ConfigError(f"unknown noise family {self.family!r}")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` independent values.

        Raises:
            ValueError: If truncation keeps rejecting after many rounds
        """
        values = np.asarray(self._draw(n, rng), dtype=float)
        if self.upper is None:
            return values
        keep = values[values <= self.upper]
        rounds = 0
        while keep.size < n:
            rounds += 1
            if rounds > MAX_REJECTION_ROUNDS:
                raise ValueError(f"truncation at {self.upper} rejects almost every draw")
            more = np.asarray(self._draw(n, rng), dtype=float)
            keep = np.concatenate([keep, more[more <= self.upper]])
        return keep[:n]

    def describe(self) -> str:
        """Compact human-readable formula."""
        p = self.params
        match self.family:
            case "gaussian":
                text = f"N({p['loc']:g}, {p['scale']:g})"
            case "gumbel":
                text = f"Gumbel({p['loc']:g}, {p['scale']:g})"
            case "exponential":
                text = f"Exp({p['rate']:g})"
            case "gamma":
                text = f"Gamma({p['shape']:g}, {p['scale']:g})"
            case "bernoulli":
                text = f"Ber({p['p']:g})"
            case "power_law":
                text = f"Pow({p['alpha']:g})"
            case "product":
                text = "×".join(c.describe() for c in self.children)
            case "power":
                text = f"({self.children[0].describe()})^{p['exponent']:g}"
            case "log":
                text = f"log({self.children[0].describe()})"
            case _:
                text = f"{p['scale']:g}·({self.children[0].describe()}) + {p['shift']:g}"
        if self.upper is not None:
            text += f" | ≤ {self.upper:g}"
        return text

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"family": self.family}
        if self.params:
            data["params"] = dict(self.params)
        if self.children:
            data["children"] = [c.to_dict() for c in self.children]
        if self.upper is not None:
            data["upper"] = self.upper
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> NoiseSpec:
        try:
            return cls(
                family=data["family"],
                params=dict(data.get("params", {})),
                children=tuple(cls.from_dict(c) for c in data.get("children", [])),
                upper=data.get("upper"),
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"malformed noise specification: {e}") from e
