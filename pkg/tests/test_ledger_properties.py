"""Ledger invariants as property tests over randomized generators."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chain_scenarios import append_only_case, chain_integrity_case, convergence_case
from twinledger.ledger.types import LogEntry, TooManyTopics

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=150)
@given(seeds)
def test_chain_integrity_pow_and_replay(seed):
    chain_integrity_case(random.Random(seed))


@settings(max_examples=150)
@given(seeds)
def test_three_node_convergence(seed):
    convergence_case(random.Random(seed))


@settings(max_examples=150)
@given(seeds)
def test_append_only_at_confirmation_depth(seed):
    append_only_case(random.Random(seed))


@settings(max_examples=60)
@given(st.integers(4, 12), st.binary(min_size=32, max_size=32))
def test_log_entries_never_exceed_three_topics(extra, topic):
    with pytest.raises(TooManyTopics):
        LogEntry(emitter=topic, topics=tuple([topic] * extra))


def test_stored_logs_all_within_cap(keys):
    # Every log the registry ever emits stays at <= 3 topics by type
    # construction; sample a real chain to be sure.
    from helpers import deploy_registry, fresh_node, register_trust_tx, set_twin_tx, twin_config
    from twinledger.contracts.model import StorageMode

    node = fresh_node()
    registry, _ = deploy_registry(node, keys[0], StorageMode.LOGS)
    node.submit_transaction(set_twin_tx(keys[0], registry, twin_config("twin001", keys[0], keys[1]), 1))
    node.submit_transaction(register_trust_tx(keys[0], registry, "twin001", keys[1], 2))
    node.mine_round()
    entries = node.query_logs()
    assert entries and all(len(e.topics) <= 3 for e in entries)
