"""Figure rendering for benchmark reports.

Each report command writes its figures next to the CSV: grouped bars
for the gas comparison, per-mode lines for the latency trends.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..contracts.model import StorageMode
from .reports import GasReport, LatencyReport

MODE_COLORS = {StorageMode.VARIABLES: "#4c72b0", StorageMode.LOGS: "#dd8452"}


def render_gas_figure(rows: Sequence[GasReport], path) -> Path:
    path = Path(path)
    operations = sorted({r.operation for r in rows})
    modes = [StorageMode.VARIABLES, StorageMode.LOGS]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    width = 0.35
    for mi, mode in enumerate(modes):
        xs, ys = [], []
        for oi, op in enumerate(operations):
            for r in rows:
                if r.mode == mode and r.operation == op:
                    xs.append(oi + (mi - 0.5) * width)
                    ys.append(r.gas_used)
        if xs:
            bars = ax.bar(xs, ys, width=width, label=mode.value, color=MODE_COLORS[mode])
            ax.bar_label(bars, fmt="%d", fontsize=8)
    ax.set_xticks(range(len(operations)))
    ax.set_xticklabels(operations)
    ax.set_ylabel("gas units")
    ax.set_title("Registry gas cost by storage mode")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_latency_figures(rows: Sequence[LatencyReport], total_path, per_tx_path) -> tuple[Path, Path]:
    total_path, per_tx_path = Path(total_path), Path(per_tx_path)
    modes = sorted({r.mode for r in rows}, key=lambda m: m.value, reverse=True)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode in modes:
        pts = sorted((r.n_twins, r.total_latency) for r in rows if r.mode == mode)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=mode.value, color=MODE_COLORS[mode])
    ax.set_xlabel("twins created")
    ax.set_ylabel("total latency (s)")
    ax.set_title("Latency creating twin groups")
    ax.legend()
    fig.tight_layout()
    fig.savefig(total_path, dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode in modes:
        pts = sorted((r.n_twins, r.mean_per_tx) for r in rows if r.mode == mode)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=mode.value, color=MODE_COLORS[mode])
    ax.set_xlabel("twins created")
    ax.set_ylabel("mean latency per transaction (ms)")
    ax.set_title("Per-transaction latency")
    ax.legend()
    fig.tight_layout()
    fig.savefig(per_tx_path, dpi=120)
    plt.close(fig)
    return total_path, per_tx_path
