"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line with its measured evidence. Budgets are wall-clock and asserted.

The latency criteria run the real benchmark pipeline at its default
scale, so this module dominates the suite's runtime (a few minutes).
"""

import dataclasses
import random
import time

from chain_scenarios import append_only_case, chain_integrity_case, convergence_case
from equivalence import run_equivalence_case
from twinledger.bench.demo import run_smartcity_demo
from twinledger.bench.gas_bench import run_gas_bench
from twinledger.bench.latency_bench import LatencyBenchConfig, run_latency_bench
from twinledger.contracts.abi import encode_store_trust_values
from twinledger.contracts.gas import GasSchedule, charge
from twinledger.contracts.model import StorageMode
from twinledger.contracts.registry import compact_topic
from twinledger.crypto import Keypair
from twinledger.encoding import tagged_hash
from twinledger.ledger.genesis import GenesisSpec, make_node
from twinledger.ledger.types import LogEntry, TooManyTopics, sign_transaction


def report(number: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number} [{name}]: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {number} ({name}): {detail}"


def test_criterion_1_gas_direction_and_ratio():
    started = time.perf_counter()
    rows = run_gas_bench()
    elapsed = time.perf_counter() - started
    by_key = {(r.mode, r.operation): r for r in rows}
    deploy_v = by_key[(StorageMode.VARIABLES, "deploy")].gas_used
    deploy_l = by_key[(StorageMode.LOGS, "deploy")].gas_used
    ratio = deploy_l / deploy_v
    saving = (1 - ratio) * 100
    ok = ratio <= 0.70 and saving >= 30.0 and elapsed < 5.0
    report(
        1,
        "gas direction & ratio",
        ok,
        f"deploy logs/variables = {deploy_l}/{deploy_v} = {ratio:.3f} "
        f"(saving {saving:.2f}%), runtime {elapsed:.2f}s < 5s",
    )


def test_criterion_2_storage_gas_ordering_under_perturbation():
    started = time.perf_counter()
    rng = random.Random(0xC2)
    defaults = GasSchedule()
    checked = 0
    while checked < 200:
        factors = {
            f.name: rng.uniform(0.25, 4.0) for f in dataclasses.fields(GasSchedule)
        }
        schedule = GasSchedule(**{
            name: max(1, int(getattr(defaults, name) * factor))
            for name, factor in factors.items()
        })
        if schedule.sstore_set < 10 * schedule.log_topic:
            continue
        variables = schedule.tx_base + charge(schedule, "sstore_set", slots=3)
        logs = schedule.tx_base + charge(schedule, "log", topics=3, data_bytes=0)
        assert logs < variables, f"ordering violated by schedule {schedule}"
        checked += 1
    elapsed = time.perf_counter() - started
    ok = elapsed < 10.0
    report(
        2,
        "storage-op gas ordering",
        ok,
        f"gas(logs) < gas(variables) for the 3-value write across {checked} "
        f"random schedules with sstore_set >= 10x log_topic, runtime {elapsed:.2f}s < 10s",
    )


def test_criterion_3_latency_trends():
    started = time.perf_counter()
    config = LatencyBenchConfig(
        n_list=(1000, 2000, 3000, 4000, 5000), difficulty=12, runs=5
    )
    rows = run_latency_bench(config)
    elapsed = time.perf_counter() - started

    per_mode = {
        mode: sorted((r for r in rows if r.mode == mode), key=lambda r: r.n_twins)
        for mode in config.modes
    }
    monotone = all(
        all(earlier.mean_per_tx < later.mean_per_tx for earlier, later in zip(seq, seq[1:]))
        for seq in per_mode.values()
    )
    totals_increase = all(
        all(earlier.total_latency < later.total_latency for earlier, later in zip(seq, seq[1:]))
        for seq in per_mode.values()
    )
    arithmetic = all(r.arithmetic_consistent(0.01) for r in rows)

    def aggregate_per_tx(mode):
        seq = per_mode[mode]
        return sum(r.total_latency for r in seq) * 1000.0 / sum(r.n_twins for r in seq)

    mean_l = aggregate_per_tx(StorageMode.LOGS)
    mean_v = aggregate_per_tx(StorageMode.VARIABLES)
    logs_close = mean_l <= 1.02 * mean_v

    curves = "; ".join(
        f"{mode.value}: " + " -> ".join(f"{r.mean_per_tx:.3f}" for r in seq)
        for mode, seq in per_mode.items()
    )
    ok = monotone and totals_increase and arithmetic and logs_close and elapsed < 600
    report(
        3,
        "latency trends",
        ok,
        f"per-tx ms {curves}; aggregate logs {mean_l:.3f} <= 1.02 x variables "
        f"{mean_v:.3f} = {1.02 * mean_v:.3f}; runtime {elapsed:.0f}s < 600s",
    )


def test_criterion_4_consensus_dominates():
    started = time.perf_counter()
    ratios = {}
    per_tx = {}
    for difficulty in (8, 16):
        rows = run_latency_bench(
            LatencyBenchConfig(n_list=(1000,), difficulty=difficulty, runs=5)
        )
        for row in rows:
            per_tx[(difficulty, row.mode)] = row.mean_per_tx
    for mode in (StorageMode.VARIABLES, StorageMode.LOGS):
        ratios[mode] = per_tx[(16, mode)] / per_tx[(8, mode)]
    elapsed = time.perf_counter() - started
    ok = all(ratio >= 10.0 for ratio in ratios.values()) and elapsed < 300
    report(
        4,
        "consensus dominates",
        ok,
        "difficulty 8->16 per-tx ratio "
        + ", ".join(f"{m.value} {r:.1f}x" for m, r in ratios.items())
        + f" (>= 10x required), runtime {elapsed:.0f}s < 300s",
    )


def test_criterion_5_mode_equivalence_oracle():
    started = time.perf_counter()
    rng = random.Random(0xC5)
    cases = 0
    total_ops = 0
    for _ in range(100):
        stats = run_equivalence_case(rng.randrange(2**32), n_ops=1000)
        cases += 1
        total_ops += stats["ops"]
    elapsed = time.perf_counter() - started
    ok = cases == 100 and total_ops == 100_000 and elapsed < 30
    report(
        5,
        "mode-equivalence oracle",
        ok,
        f"{cases} random 1000-op sequences: identical decisions, outputs, and "
        f"reconstructed records across storage modes; runtime {elapsed:.1f}s < 30s",
    )


def test_criterion_6_multitenant_isolation_end_to_end():
    started = time.perf_counter()
    exit_code = run_smartcity_demo(difficulty=0, emit=lambda *_: None)
    elapsed = time.perf_counter() - started
    ok = exit_code == 0 and elapsed < 30
    report(
        6,
        "multitenant isolation demo",
        ok,
        f"smartcity demo exit code {exit_code}, runtime {elapsed:.1f}s < 30s",
    )


def test_criterion_7_ledger_invariant_suite():
    started = time.perf_counter()
    rng = random.Random(0xC7)
    cases = 0
    for _ in range(170):
        chain_integrity_case(random.Random(rng.randrange(2**32)))
        cases += 1
    for _ in range(170):
        convergence_case(random.Random(rng.randrange(2**32)))
        cases += 1
    for _ in range(170):
        append_only_case(random.Random(rng.randrange(2**32)))
        cases += 1
    elapsed = time.perf_counter() - started
    ok = cases >= 500 and elapsed < 60
    report(
        7,
        "ledger invariant suite",
        ok,
        f"{cases} randomized cases: hash-chain integrity, PoW soundness, "
        f"deterministic replay, 3-node convergence, depth-k stability; "
        f"runtime {elapsed:.1f}s < 60s",
    )


def test_criterion_8_log_topic_cap_and_compact_fallback():
    # Storing more than three indexed topics must be impossible.
    try:
        LogEntry(emitter=b"\x00" * 32, topics=tuple([b"\x11" * 32] * 4))
        over_cap_rejected = False
    except TooManyTopics:
        over_cap_rejected = True

    node = make_node(GenesisSpec(difficulty=0, n_nodes=1))
    # Filtering on more than three topics must be rejected too.
    try:
        node.query_logs(topics=(None, None, None, None))
        filter_rejected = False
    except TooManyTopics:
        filter_rejected = True

    # Fallback: five searchable values folded into one topic round-trip
    # through the log query.
    deployer = Keypair.from_seed(b"acceptance-8")
    deploy_tx = sign_transaction(deployer, None, b"\x01", 0)  # logs mode
    node.submit_transaction(deploy_tx)
    node.mine_round()
    registry = node.get_receipt(deploy_tx.tx_id).output

    many_values = [tagged_hash(b"acceptance/value", bytes([i])) for i in range(5)]
    folded = compact_topic(*many_values)
    settlor = Keypair.from_seed(b"acceptance-8-settlor")
    tx = sign_transaction(
        settlor,
        registry,
        encode_store_trust_values(settlor.address, deployer.address, folded),
        0,
    )
    node.submit_transaction(tx)
    node.mine_round()

    matches = node.query_logs(topics=(None, None, folded))
    round_trips = (
        len(matches) == 1
        and matches[0].topics[2] == compact_topic(*many_values)
        and len(matches[0].topics) <= 3
    )
    ok = over_cap_rejected and filter_rejected and round_trips
    report(
        8,
        "log cap & compact-topic fallback",
        ok,
        f"4-topic store rejected: {over_cap_rejected}; 4-topic filter rejected: "
        f"{filter_rejected}; 5 values folded into one topic found by query: {round_trips}",
    )
