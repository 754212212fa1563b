from .gas_bench import run_gas_bench
from .latency_bench import LatencyBenchConfig, run_latency_bench
from .demo import run_smartcity_demo
from .reports import (
    GAS_CSV_COLUMNS,
    LATENCY_CSV_COLUMNS,
    GasReport,
    IoFailure,
    LatencyReport,
    emit_csv,
)

__all__ = [
    "GAS_CSV_COLUMNS",
    "GasReport",
    "IoFailure",
    "LATENCY_CSV_COLUMNS",
    "LatencyBenchConfig",
    "LatencyReport",
    "emit_csv",
    "run_gas_bench",
    "run_latency_bench",
    "run_smartcity_demo",
]
