"""Benchmark report rows and CSV emission."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from ..contracts.model import StorageMode


class IoFailure(Exception):
    pass


GAS_CSV_COLUMNS = ("mode", "operation", "gas_used", "saving_vs_variables_pct")
LATENCY_CSV_COLUMNS = (
    "mode",
    "n_twins",
    "total_latency_s",
    "mean_per_tx_ms",
    "difficulty",
    "runs",
)


@dataclass(frozen=True)
class GasReport:
    mode: StorageMode
    operation: str  # deploy | store
    gas_used: int
    saving_vs_variables: Optional[float] = None  # percent, logs rows only

    def csv_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "operation": self.operation,
            "gas_used": self.gas_used,
            "saving_vs_variables_pct": (
                "" if self.saving_vs_variables is None else f"{self.saving_vs_variables:.2f}"
            ),
        }


@dataclass(frozen=True)
class LatencyReport:
    mode: StorageMode
    n_twins: int
    total_latency: float  # seconds, mean over runs
    mean_per_tx: float  # milliseconds
    difficulty: int
    runs: int

    def csv_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n_twins": self.n_twins,
            "total_latency_s": f"{self.total_latency:.6f}",
            "mean_per_tx_ms": f"{self.mean_per_tx:.6f}",
            "difficulty": self.difficulty,
            "runs": self.runs,
        }

    def arithmetic_consistent(self, tolerance: float = 0.01) -> bool:
        derived = self.mean_per_tx * self.n_twins / 1000.0
        return abs(derived - self.total_latency) <= tolerance * max(self.total_latency, 1e-9)


def emit_csv(rows: Sequence, path, columns: Sequence[str]) -> Path:
    """Header plus one line per row, written atomically; reruns replace
    the file in place."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with tmp.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(columns))
            writer.writeheader()
            for row in rows:
                writer.writerow(row.csv_dict() if hasattr(row, "csv_dict") else row)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            tmp.unlink(missing_ok=True)
        except OSError:
            pass
        raise IoFailure(f"cannot write report to {path}: {exc}") from exc
    return path
