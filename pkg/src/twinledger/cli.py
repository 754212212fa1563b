"""Command-line harness.

    twinledger bench gas [--mode variables|logs] [--out gas.csv]
    twinledger bench latency --n 1000..5000 --difficulty 12 --runs 5
    twinledger demo smartcity [--mode ...] [--skip-revocation]
    twinledger twin start --id twin001 --chain chain.ndjson --resource meter01

Report commands write CSV and render the matching figures next to it
(suppress with --no-figures). Exit codes: 0 ok, 1 assertion or
benchmark failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bench.gas_bench import run_gas_bench
from .bench.latency_bench import (
    DEFAULT_DIFFICULTY,
    DEFAULT_RUNS,
    LatencyBenchConfig,
    run_latency_bench,
)
from .bench.demo import run_smartcity_demo
from .bench.reports import (
    GAS_CSV_COLUMNS,
    LATENCY_CSV_COLUMNS,
    IoFailure,
    emit_csv,
)
from .clock import SimClock
from .contracts.model import StorageMode
from .gateway.chainclient import ChainFileClient, ChainUnreachable, MismatchedTwin, UnknownTwin
from .gateway.coap import PortUnavailable
from .gateway.twin import start_twin
from .ledger.genesis import GenesisSpec
from .sensors import DuplicateId, SensorFleet


def _parse_modes(value: str) -> tuple[StorageMode, ...]:
    if value == "both":
        return (StorageMode.VARIABLES, StorageMode.LOGS)
    return (StorageMode(value),)


def _parse_n_list(value: str) -> tuple[int, ...]:
    """Accepts '1000..5000' (step 1000) or a comma list '100,200,300'."""
    if ".." in value:
        lo, hi = value.split("..", 1)
        lo, hi = int(lo), int(hi)
        if lo <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad group range {value!r}")
        step = 1000 if hi - lo >= 1000 else max(1, (hi - lo) or 1)
        return tuple(range(lo, hi + 1, step))
    try:
        return tuple(int(part) for part in value.split(",") if part)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad group list {value!r}") from exc


def _load_config(path) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twinledger", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="JSON config file (difficulty, resources, ...)")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run one of the measurement campaigns")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    gas = bench_sub.add_parser("gas", help="deployment and storage gas in both modes")
    gas.add_argument("--mode", choices=["variables", "logs", "both"], default="both")
    gas.add_argument("--out", default="gas_report.csv")
    gas.add_argument("--no-figures", action="store_true")
    gas.add_argument("--seed", type=int, default=0)

    latency = bench_sub.add_parser("latency", help="twin-creation latency per group size")
    latency.add_argument("--n", type=_parse_n_list, default=(1000, 2000, 3000, 4000, 5000),
                         help="group sizes: '1000..5000' or '100,200'")
    latency.add_argument("--difficulty", type=int, default=DEFAULT_DIFFICULTY)
    latency.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    latency.add_argument("--mode", choices=["variables", "logs", "both"], default="both")
    latency.add_argument("--workers", type=int, default=1)
    latency.add_argument("--max-block-txs", type=int, default=20)
    latency.add_argument("--confirmations", type=int, default=1)
    latency.add_argument("--out", default="latency_report.csv")
    latency.add_argument("--no-figures", action="store_true")
    latency.add_argument("--seed", type=int, default=0)
    latency.add_argument("--quiet", action="store_true")

    demo = sub.add_parser("demo", help="scripted end-to-end scenarios")
    demo_sub = demo.add_subparsers(dest="demo_command", required=True)
    smartcity = demo_sub.add_parser("smartcity", help="multitenant smart-city walkthrough")
    smartcity.add_argument("--mode", choices=["variables", "logs"], default="variables")
    smartcity.add_argument("--difficulty", type=int, default=0)
    smartcity.add_argument("--skip-revocation", action="store_true")

    twin = sub.add_parser("twin", help="twin instance management")
    twin_sub = twin.add_subparsers(dest="twin_command", required=True)
    start = twin_sub.add_parser("start", help="serve one twin from a chain dump")
    start.add_argument("--id", required=True, dest="twin_id")
    start.add_argument("--chain", required=True, help="chain dump (newline-delimited JSON blocks)")
    start.add_argument("--resource", required=True, help="resource id from the config file fleet")
    start.add_argument("--genesis", help="genesis JSON (needed when the dump has pre-registered accounts)")
    start.add_argument("--http-port", type=int, default=0)
    start.add_argument("--coap-port", type=int, default=0)
    start.add_argument("--confirmations", type=int, default=3)
    start.add_argument("--clock-start", type=int, default=None,
                       help="logical clock start (default: genesis timestamp)")

    return parser


def _cmd_bench_gas(args) -> int:
    started = time.perf_counter()
    rows = run_gas_bench(modes=_parse_modes(args.mode) if args.mode != "both" else None,
                         seed=args.seed)
    out = emit_csv(rows, args.out, GAS_CSV_COLUMNS)
    for row in rows:
        saving = "" if row.saving_vs_variables is None else f"  saving {row.saving_vs_variables:.2f}%"
        print(f"{row.operation:>7}  {row.mode.value:>9}  {row.gas_used:>8} gas{saving}")
    print(f"wrote {out} ({time.perf_counter() - started:.2f}s)")
    if not args.no_figures:
        from .bench.figures import render_gas_figure

        fig = render_gas_figure(rows, Path(args.out).with_suffix(".png"))
        print(f"wrote {fig}")
    return 0


def _cmd_bench_latency(args) -> int:
    config = LatencyBenchConfig(
        n_list=tuple(args.n),
        difficulty=args.difficulty,
        runs=args.runs,
        modes=_parse_modes(args.mode),
        max_block_txs=args.max_block_txs,
        workers=args.workers,
        confirmations=args.confirmations,
        seed=args.seed,
    )
    progress = None if args.quiet else lambda line: print(f"  {line}")
    rows = run_latency_bench(config, progress=progress)
    out = emit_csv(rows, args.out, LATENCY_CSV_COLUMNS)
    for row in rows:
        print(
            f"{row.mode.value:>9}  n={row.n_twins:<5}  total {row.total_latency:8.3f}s  "
            f"per-tx {row.mean_per_tx:8.3f}ms  (difficulty {row.difficulty}, {row.runs} runs)"
        )
    print(f"wrote {out}")
    if not args.no_figures:
        from .bench.figures import render_latency_figures

        base = Path(args.out)
        total_fig, per_tx_fig = render_latency_figures(
            rows, base.with_suffix(".total.png"), base.with_suffix(".per_tx.png")
        )
        print(f"wrote {total_fig}")
        print(f"wrote {per_tx_fig}")
    return 0


def _cmd_twin_start(args, config: dict) -> int:
    resources = config.get("resources", [])
    try:
        fleet = SensorFleet.from_config(resources)
    except DuplicateId as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sensor = fleet.get(args.resource)
    if sensor is None:
        print(f"error: resource {args.resource!r} not in the config fleet", file=sys.stderr)
        return 1
    genesis = GenesisSpec.load(args.genesis) if args.genesis else None
    try:
        chain = ChainFileClient(args.chain, genesis=genesis, confirmations=args.confirmations)
        clock_start = args.clock_start
        if clock_start is None:
            clock_start = chain.node.genesis_block.timestamp
        instance = start_twin(
            args.twin_id,
            chain,
            sensor,
            SimClock(clock_start),
            http_port=args.http_port,
            coap_port=args.coap_port,
        )
    except (UnknownTwin, MismatchedTwin, ChainUnreachable, PortUnavailable) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"twin {args.twin_id} serving:")
    print(f"  http://{instance.http_address[0]}:{instance.http_address[1]}/http_api/talk_to_third_party")
    print(f"  http://{instance.http_address[0]}:{instance.http_address[1]}/http_api/talk_to_bc")
    print(f"  udp {instance.coap_address[0]}:{instance.coap_address[1]} /coap_api/talk_to_dt")
    try:
        while True:
            time.sleep(1)
    except KeyboardInterrupt:
        instance.close()
        print("twin stopped")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "bench" and args.bench_command == "gas":
            return _cmd_bench_gas(args)
        if args.command == "bench" and args.bench_command == "latency":
            return _cmd_bench_latency(args)
        if args.command == "demo" and args.demo_command == "smartcity":
            return run_smartcity_demo(
                mode=StorageMode(args.mode),
                difficulty=args.difficulty,
                skip_revocation=args.skip_revocation,
            )
        if args.command == "twin" and args.twin_command == "start":
            return _cmd_twin_start(args, config)
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
