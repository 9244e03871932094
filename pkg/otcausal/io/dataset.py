"""Sample matrices on disk: comma-separated values with a header row."""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pyarrow as pa
import pyarrow.compute as pc
from pyarrow import csv as pacsv

from ..errors import CsvParseError, DataError

logger = logging.getLogger(__name__)

_ROW = re.compile(r"Row #(\d+)")


@dataclass(frozen=True)
class Dataset:
    """Sample matrix with column names."""

    values: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise DataError(f"{len(self.names)} column names for a matrix of shape {self.values.shape}")

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    def select(self, columns: Sequence[int]) -> Dataset:
        columns = list(columns)
        return Dataset(self.values[:, columns], tuple(self.names[c] for c in columns))

    def to_arrow(self) -> pa.Table:
        return pa.table({name: pa.array(self.values[:, j], type=pa.float64()) for j, name in enumerate(self.names)})


def _column_values(column: pa.ChunkedArray, name: str) -> np.ndarray:
    if pa.types.is_floating(column.type) or pa.types.is_integer(column.type):
        if column.null_count:
            row = int(pc.index(pc.is_null(column), True).as_py())
            raise CsvParseError(row + 1, name, "missing value")
        values = column.cast(pa.float64()).to_numpy()
    else:
        # inference fell back to text: find the first cell that is not a number
        values = np.empty(len(column))
        for i, cell in enumerate(column.to_pylist()):
            if cell is None or cell == "":
                raise CsvParseError(i + 1, name, "missing value")
            try:
                values[i] = float(cell)
            except ValueError:
                raise CsvParseError(i + 1, name, f"not a number: {cell!r}") from None
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise CsvParseError(int(bad[0]) + 1, name, f"non-finite value {values[bad[0]]}")
    return values


def load_csv(path: str | Path, log_transform: bool = False) -> Dataset:
    """Read a numeric CSV file.

    Args:
        path: File with a header row and one numeric column per variable
        log_transform: Apply the natural logarithm to every entry

    Returns:
        The samples and their column names

    Raises:
        CsvParseError: With the 1-based data row and the column name of the
            first malformed cell, or of a non-positive cell under ``log_transform``
        DataError: If the file cannot be opened
    """
    path = Path(path)
    try:
        table = pacsv.read_csv(path, convert_options=pacsv.ConvertOptions(strings_can_be_null=True))
    except pa.ArrowInvalid as e:
        match = _ROW.search(str(e))
        row = int(match.group(1)) - 1 if match else 0
        raise CsvParseError(row, "", str(e).splitlines()[0]) from e
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e

    names = tuple(table.column_names)
    if not names:
        raise CsvParseError(0, "", "file has no header")
    columns = [_column_values(table.column(j), name) for j, name in enumerate(names)]
    values = np.column_stack(columns) if columns else np.zeros((0, 0))
    if values.shape[0] == 0:
        raise CsvParseError(1, names[0], "file has no data rows")

    if log_transform:
        rows, cols = np.nonzero(values <= 0)
        if rows.size:
            r, c = int(rows[0]), int(cols[0])
            raise CsvParseError(r + 1, names[c], f"value {values[r, c]} is not positive and cannot be log-transformed")
        values = np.log(values)

    logger.info("Loaded %d rows x %d columns from %s", values.shape[0], values.shape[1], path)
    return Dataset(values, names)


def save_csv(path: str | Path, values, names: Sequence[str] | None = None) -> None:
    """Write a sample matrix with a header row.

    Doubles are written in shortest round-trip form, so :func:`load_csv`
    recovers the matrix exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {values.shape}")
    names = tuple(names) if names is not None else tuple(f"X{j + 1}" for j in range(values.shape[1]))
    dataset = Dataset(values, names)
    pacsv.write_csv(dataset.to_arrow(), Path(path))
    logger.info("Wrote %d rows to %s", values.shape[0], path)

