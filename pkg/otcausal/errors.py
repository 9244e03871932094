"""Error types raised by otcausal.

All library errors derive from :class:`OtCausalError`. Errors that signal an
invalid argument also derive from :class:`ValueError` so callers can keep
catching the builtin.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class OtCausalError(Exception):
    """Base class for all otcausal errors."""


@dataclass
class DimensionError(OtCausalError, ValueError):
    """A point, sample matrix or term did not have the expected arity."""

    expected: int
    actual: int
    what: str = "input"

    def __str__(self) -> str:
        return f"{self.what} has dimension {self.actual}, expected {self.expected}"


@dataclass
class DegenerateMapError(OtCausalError):
    """The diagonal partial of a map component vanished at a sample."""

    sample_index: int
    component: int | None = None

    def __str__(self) -> str:
        where = f" in component {self.component + 1}" if self.component is not None else ""
        return f"degenerate map: diagonal partial is not positive at sample {self.sample_index}{where}"


@dataclass
class DataError(OtCausalError, ValueError):
    """Sample data cannot be used (non-finite values, constant columns)."""

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class ConditioningError(OtCausalError):
    """The regularized Fisher information could not be factorized."""

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class FitError(OtCausalError):
    """A map or score fit failed; carries the subset or ordering it was run on."""

    message: str
    subset: tuple[int, ...] | None = None
    ordering: tuple[int, ...] | None = None

    def __str__(self) -> str:
        if self.subset is not None:
            return f"{self.message} (subset {_one_based(self.subset)})"
        if self.ordering is not None:
            return f"{self.message} (ordering {'→'.join(str(i + 1) for i in self.ordering)})"
        return self.message


@dataclass
class InconsistentGraphError(OtCausalError, ValueError):
    """A graph violates its structural invariants or has no consistent extension."""

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class GenerationError(OtCausalError):
    """A structural equation produced a non-finite value."""

    node: int
    message: str = "non-finite value generated"

    def __str__(self) -> str:
        return f"{self.message} at node X{self.node + 1}"


@dataclass
class CsvParseError(OtCausalError, ValueError):
    """A CSV cell could not be read; row is the 1-based data row."""

    row: int
    column: str
    message: str

    def __str__(self) -> str:
        return f"row {self.row}, column {self.column!r}: {self.message}"


@dataclass
class ConfigError(OtCausalError, ValueError):
    """Invalid configuration value, unknown preset or malformed plan."""

    message: str
    keys: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        return self.message


def _one_based(indices: tuple[int, ...]) -> str:
    return "{" + ",".join(str(i + 1) for i in indices) + "}"
