"""Configuration for fits, CI tests, PC-OT and ordering scores.

Settings are plain keyword-only dataclasses. :func:`load_settings` layers them
with the precedence defaults < JSON config file < ``OTCAUSAL_*`` environment
variables < explicit overrides (usually CLI flags).

Example:
    >>> settings = load_settings(env={"OTCAUSAL_CI_DELTA": "3"})
    >>> settings.ci.delta
    3.0
"""

from __future__ import annotations

import json
import logging
import os
import types
import typing
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any, Literal

from .errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "OTCAUSAL_"

ThresholdKind = Literal["std", "variance"]
PnlNormalization = Literal["mean_derivative", "unit_variance"]
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(kw_only=True, frozen=True)
class FitOptions:
    """Options of the maximum-likelihood map fit."""

    degree: int = 2
    tol: float = 1e-6
    max_iters: int = 500
    ridge: float = 1e-8
    # None means degree + 3 nodes
    quadrature_order: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ConfigError(f"fit degree must be >= 0, got {self.degree}")
        if self.tol <= 0:
            raise ConfigError(f"fit tolerance must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.ridge < 0:
            raise ConfigError(f"ridge must be >= 0, got {self.ridge}")
        if self.quadrature_order is not None and self.quadrature_order < 1:
            raise ConfigError(f"quadrature order must be >= 1, got {self.quadrature_order}")


@dataclass(kw_only=True, frozen=True)
class CiOptions:
    """Options of the Ω conditional-independence test."""

    delta: float = 2.0
    threshold: ThresholdKind = "std"
    fisher_ridge: float = 1e-8
    orders: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.threshold not in ("std", "variance"):
            raise ConfigError(f"threshold must be 'std' or 'variance', got {self.threshold!r}")
        if self.orders < 1:
            raise ConfigError(f"orders must be >= 1, got {self.orders}")


@dataclass(kw_only=True, frozen=True)
class PcOtConfig:
    """Configuration of a PC-OT run."""

    ci: CiOptions = field(default_factory=CiOptions)
    fit: FitOptions = field(default_factory=FitOptions)
    max_level: int | None = None
    workers: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.fit.degree < 1:
            raise ConfigError(f"PC-OT needs a map degree >= 1, got {self.fit.degree}")
        if self.max_level is not None and self.max_level < 0:
            raise ConfigError(f"max_level must be >= 0, got {self.max_level}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(kw_only=True, frozen=True)
class OrderOptions:
    """Options of the ANM/PNL ordering scores."""

    fit: FitOptions = field(default_factory=FitOptions)
    bk_degree: int = 3
    huber_widths: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    pnl_normalization: PnlNormalization = "mean_derivative"
    max_iters: int = 500
    ridge: float = 1e-8
    workers: int = 1

    def __post_init__(self) -> None:
        if self.bk_degree < 0:
            raise ConfigError(f"bk_degree must be >= 0, got {self.bk_degree}")
        if not self.huber_widths or any(w <= 0 for w in self.huber_widths):
            raise ConfigError("huber_widths must be a non-empty list of positive widths")
        if self.pnl_normalization not in ("mean_derivative", "unit_variance"):
            raise ConfigError(f"unknown PNL normalization {self.pnl_normalization!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(kw_only=True, frozen=True)
class Settings:
    """Top-level settings shared by the CLI and the experiment runner."""

    seed: int = 0
    workers: int = 1
    log_level: str = "WARNING"
    fit: FitOptions = field(default_factory=FitOptions)
    ci: CiOptions = field(default_factory=CiOptions)
    order: OrderOptions = field(default_factory=OrderOptions)
    max_level: int | None = None

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"unknown log level {self.log_level!r}; choose from {list(LOG_LEVELS)}")

    def pc_ot(self) -> PcOtConfig:
        """Assemble the PC-OT configuration from these settings."""
        return PcOtConfig(
            ci=replace(self.ci, seed=self.seed),
            fit=replace(self.fit, seed=self.seed),
            max_level=self.max_level,
            workers=self.workers,
            seed=self.seed,
        )

    def order_options(self) -> OrderOptions:
        """Ordering options with the shared fit options and worker count."""
        return replace(self.order, fit=replace(self.fit, seed=self.seed), workers=self.workers)

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-compatible dictionary."""
        return asdict(self)


def load_settings(
    config_path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> Settings:
    """Build :class:`Settings` from a config file, the environment and overrides.

    Args:
        config_path: Optional JSON file with a (possibly nested) settings object
        env: Environment mapping, defaults to ``os.environ``
        overrides: Dotted keys (``"ci.delta"``) or top-level keys with values that
            win over everything else; ``None`` values are ignored

    Returns:
        The merged settings

    Raises:
        ConfigError: On unknown keys or values that cannot be coerced
    """
    values: dict[str, Any] = {}

    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {config_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {config_path} must contain a JSON object")
        values.update(flatten_keys(data))

    environ = os.environ if env is None else env
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = _env_key(name[len(ENV_PREFIX) :])
        if key is None:
            logger.debug("Ignoring unknown environment variable %s", name)
            continue
        values[key] = raw

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    return _build(Settings, values, prefix="")


def flatten_keys(data: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    """Flatten nested mappings to dotted keys (``{"ci": {"delta": 3}}`` -> ``{"ci.delta": 3}``)."""
    flat: dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten_keys(value, prefix=f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def _known_keys(cls: type, prefix: str = "") -> list[str]:
    keys: list[str] = []
    hints = typing.get_type_hints(cls)
    for f in fields(cls):
        hint = hints[f.name]
        if isinstance(hint, type) and is_dataclass(hint):
            keys.extend(_known_keys(hint, prefix=f"{prefix}{f.name}."))
        else:
            keys.append(f"{prefix}{f.name}")
    return keys


def _env_key(suffix: str) -> str | None:
    # OTCAUSAL_CI_DELTA -> ci.delta, OTCAUSAL_ORDER_FIT_DEGREE -> order.fit.degree
    wanted = suffix.lower()
    for key in _known_keys(Settings):
        if key.replace(".", "_") == wanted:
            return key
    return None


def _build(cls: type, values: Mapping[str, Any], prefix: str) -> Any:
    hints = typing.get_type_hints(cls)
    kwargs: dict[str, Any] = {}
    known = {f.name for f in fields(cls)}

    for key in values:
        if key.startswith(prefix):
            head = key[len(prefix) :].split(".", 1)[0]
            if head not in known:
                raise ConfigError(f"unknown configuration key {key!r}", keys=[key])

    for f in fields(cls):
        hint = hints[f.name]
        dotted = f"{prefix}{f.name}"
        if isinstance(hint, type) and is_dataclass(hint):
            if any(k.startswith(f"{dotted}.") for k in values):
                kwargs[f.name] = _build(hint, values, prefix=f"{dotted}.")
        elif dotted in values:
            kwargs[f.name] = _coerce(dotted, hint, values[dotted])

    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"invalid configuration for {cls.__name__}: {e}") from e


def _coerce(key: str, hint: Any, raw: Any) -> Any:
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)

    if origin in (typing.Union, types.UnionType):
        if raw is None or (isinstance(raw, str) and raw.lower() in ("", "none", "null")):
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(key, inner[0], raw)

    try:
        if origin is Literal:
            if raw not in args:
                raise ValueError(f"expected one of {list(args)}")
            return raw
        if origin is tuple:
            items = raw.split(",") if isinstance(raw, str) else list(raw)
            return tuple(_coerce(key, args[0], item) for item in items)
        if hint is bool:
            if isinstance(raw, str):
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return bool(raw)
        if hint is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError("expected an integer")
            return int(raw)
        if hint is float:
            return float(raw)
        if hint is str:
            return str(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value {raw!r} for {key}: {e}", keys=[key]) from e

    return raw
