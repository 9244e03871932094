"""Execution trace of a PC-OT run.

Every tested subset produces one :class:`TraceEntry`; the recorder stores
them in arrival order and can write them as JSON lines.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from threading import Lock
from typing import Any


@dataclass
class TraceEntry:
    """One subset evaluation.

    Attributes:
        level: Conditioning level Δ at which the subset was tested
        subset: Variable indices of the subset (0-based)
        status: "tested", "skipped" or "failed"
        omega: Pairwise Ω table (positions follow ``subset``)
        tau: Pairwise thresholds
        deleted: Edges deleted because of this subset
        message: Failure or skip reason
        elapsed: Wall time of the evaluation in seconds
    """

    level: int
    subset: tuple[int, ...]
    status: str  # "tested", "skipped", "failed"
    omega: list[list[float]] | None = None
    tau: list[list[float]] | None = None
    deleted: list[tuple[int, int]] = field(default_factory=list)
    message: str | None = None
    elapsed: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "subset": [v + 1 for v in self.subset],
            "status": self.status,
            "omega": self.omega,
            "tau": self.tau,
            "deleted": [[u + 1, v + 1] for u, v in self.deleted],
            "message": self.message,
            "elapsed": round(self.elapsed, 6),
        }


class TraceRecorder:
    """Thread-safe, append-only store of trace entries."""

    def __init__(self) -> None:
        self._entries: list[TraceEntry] = []
        self._lock = Lock()
        self._started = time.perf_counter()

    def record(self, entry: TraceEntry) -> TraceEntry:
        with self._lock:
            self._entries.append(entry)
        return entry

    def entries(self) -> list[TraceEntry]:
        with self._lock:
            return list(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def count(self, status: str) -> int:
        with self._lock:
            return sum(1 for e in self._entries if e.status == status)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict()) + "\n" for e in self.entries())

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")
