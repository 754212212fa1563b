"""Single chain node: mempool, block execution, PoW mining, fork choice.

Every applied block carries three commitments — transaction root, state
root, log-index root — recomputed from scratch over the full store, so
replaying the same transactions from genesis reproduces byte-identical
roots. Readers work against immutable snapshots; one writer applies
blocks under the node lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from ..contracts import registry as registry_mod
from ..contracts.abi import decode_deploy
from ..contracts.gas import GasSchedule
from ..contracts.registry import ContractAccount, RegistryView
from ..contracts.model import StorageMode
from ..crypto import contract_address
from ..encoding import DecodeError, enc_bytes, enc_str, enc_u64, enc_u8
from .pow import meets_difficulty, search_nonce
from .types import (
    Address,
    BadSignature,
    Block,
    IncompatibleGenesis,
    LedgerError,
    LogEntry,
    Receipt,
    StaleNonce,
    TooManyTopics,
    Transaction,
    MAX_LOG_TOPICS,
    STATUS_REVERTED,
    STATUS_SUCCESS,
    leaf_hash,
    merkle_root,
    transactions_root,
)


@dataclass(frozen=True)
class LogRecord:
    height: int
    tx_index: int
    entry: LogEntry


class ChainState:
    """Account nonces plus contract accounts; the commitment hashes one
    leaf per record so the root pins every nonce, slot, and account."""

    def __init__(self):
        self.nonces: dict[Address, int] = {}
        self.contracts: dict[Address, ContractAccount] = {}

    def copy(self) -> "ChainState":
        dup = ChainState()
        dup.nonces = dict(self.nonces)
        dup.contracts = {addr: acct.copy() for addr, acct in self.contracts.items()}
        return dup

    def commitment_leaves(self) -> list[bytes]:
        # Fixed-width leaf layouts (addresses, slot keys, and slot values
        # are all exactly 32 bytes), so no inner length prefixes needed.
        leaves = []
        nonces = self.nonces
        for addr in sorted(nonces):
            leaves.append(leaf_hash(b"N" + addr + nonces[addr].to_bytes(8, "big")))
        for addr in sorted(self.contracts):
            acct = self.contracts[addr]
            leaves.append(
                leaf_hash(b"C" + addr + enc_str(acct.mode.value) + enc_u64(acct.definition_size))
            )
            slots = acct.slots
            prefix = b"S" + addr
            for key in sorted(slots):
                leaves.append(leaf_hash(prefix + key + slots[key]))
        return leaves

    def state_root(self) -> bytes:
        return merkle_root(self.commitment_leaves())


def logs_commitment(records: list[LogRecord]) -> bytes:
    """Commitment over the cumulative log index: one leaf per entry plus
    one per indexed topic, so the searchable surface is pinned."""
    leaves = []
    for i, rec in enumerate(records):
        entry = rec.entry
        head = enc_u64(i)
        leaves.append(
            leaf_hash(
                b"L" + head + enc_u64(rec.height) + enc_u64(rec.tx_index)
                + entry.emitter + enc_bytes(entry.data)
            )
        )
        for pos, topic in enumerate(entry.topics):
            leaves.append(leaf_hash(b"T" + head + enc_u8(pos) + topic))
    return merkle_root(leaves)


@dataclass
class ExecutedBlock:
    state: ChainState
    receipts: list[Receipt]
    log_records: list[LogRecord]


def execute_transactions(
    parent_state: ChainState,
    transactions: tuple[Transaction, ...],
    height: int,
    schedule: GasSchedule,
) -> Optional[ExecutedBlock]:
    """Run a block body against a copy of the parent state.

    Returns None when any transaction is structurally invalid (bad
    signature or nonce) — such a block is unacceptable as a whole.
    Contract-level failures are valid blocks with reverted receipts.
    """
    state = parent_state.copy()
    receipts: list[Receipt] = []
    log_records: list[LogRecord] = []
    for tx_index, tx in enumerate(transactions):
        if not tx.signature_ok:
            return None
        if tx.nonce != state.nonces.get(tx.sender, 0):
            return None
        state.nonces[tx.sender] = tx.nonce + 1

        if tx.target is None:
            receipt = _execute_deploy(state, tx, schedule)
        else:
            receipt = _execute_call(state, tx, schedule)
        receipts.append(receipt)
        for entry in receipt.logs:
            log_records.append(LogRecord(height, tx_index, entry))
    return ExecutedBlock(state, receipts, log_records)


def _execute_deploy(state: ChainState, tx: Transaction, schedule: GasSchedule) -> Receipt:
    try:
        mode = decode_deploy(tx.payload)
    except DecodeError:
        return Receipt(tx.tx_id, STATUS_REVERTED, schedule.tx_base, revert_reason="BadDeployment")
    account, deploy_gas = registry_mod.deploy(mode, schedule)
    addr = contract_address(tx.sender, tx.nonce)
    state.contracts[addr] = account
    return Receipt(tx.tx_id, STATUS_SUCCESS, schedule.tx_base + deploy_gas, output=addr)


def _execute_call(state: ChainState, tx: Transaction, schedule: GasSchedule) -> Receipt:
    account = state.contracts.get(tx.target)
    if account is None:
        return Receipt(tx.tx_id, STATUS_REVERTED, schedule.tx_base, revert_reason="UnknownContract")
    result = registry_mod.execute_call(account, tx.target, tx.sender, tx.payload, schedule)
    if result.reverted:
        return Receipt(tx.tx_id, STATUS_REVERTED, result.gas_used, revert_reason=result.revert_reason)
    return Receipt(tx.tx_id, STATUS_SUCCESS, result.gas_used, logs=result.logs, output=result.output)


def resolve_fork(chain_a: list[Block], chain_b: list[Block]) -> list[Block]:
    """Longest-chain rule; equal heights break toward the smaller tip
    hash. Both chains must share a genesis block."""
    if not chain_a or not chain_b or chain_a[0].block_hash != chain_b[0].block_hash:
        raise IncompatibleGenesis("chains do not share a genesis block")
    if len(chain_a) != len(chain_b):
        return chain_a if len(chain_a) > len(chain_b) else chain_b
    return chain_a if chain_a[-1].block_hash <= chain_b[-1].block_hash else chain_b


class Node:
    def __init__(
        self,
        genesis_block: Block,
        genesis_state: ChainState,
        max_block_txs: int = 20,
        schedule: Optional[GasSchedule] = None,
        node_id: int = 0,
        confirm_depth: int = 3,
    ):
        self.genesis_block = genesis_block
        self.difficulty = genesis_block.difficulty
        self.max_block_txs = max_block_txs
        self.schedule = schedule or GasSchedule()
        self.node_id = node_id
        self.confirm_depth = confirm_depth
        self._lock = threading.RLock()

        self.blocks: list[Block] = [genesis_block]
        self._pristine_genesis_state = genesis_state.copy()
        self.state: ChainState = genesis_state.copy()
        self.log_records: list[LogRecord] = []
        self.receipts: dict[bytes, tuple[int, Receipt]] = {}
        self.mempool: dict[bytes, Transaction] = {}
        self._pending_per_sender: dict[Address, int] = {}
        self.known_blocks: dict[bytes, Block] = {genesis_block.block_hash: genesis_block}
        self._state_cache: dict[bytes, tuple[ChainState, list[LogRecord]]] = {}
        self._exec_cache: dict[bytes, ExecutedBlock] = {}

    # -- mempool -----------------------------------------------------------

    def submit_transaction(self, tx: Transaction) -> bytes:
        if not tx.signature_ok:
            raise BadSignature("transaction signature does not verify against sender")
        with self._lock:
            expected = self.state.nonces.get(tx.sender, 0) + self._pending_per_sender.get(tx.sender, 0)
            if tx.nonce != expected:
                raise StaleNonce(f"expected nonce {expected}, got {tx.nonce}")
            self.mempool[tx.tx_id] = tx
            self._pending_per_sender[tx.sender] = self._pending_per_sender.get(tx.sender, 0) + 1
            return tx.tx_id

    def pending_count(self) -> int:
        return len(self.mempool)

    def next_nonce(self, sender: Address) -> int:
        """The nonce a new transaction from ``sender`` must carry,
        counting both confirmed and pending transactions."""
        with self._lock:
            return self.state.nonces.get(sender, 0) + self._pending_per_sender.get(sender, 0)

    def _select_pending(self, limit: Optional[int] = None) -> list[Transaction]:
        limit = self.max_block_txs if limit is None else limit
        picked = []
        for tx in self.mempool.values():
            picked.append(tx)
            if len(picked) >= limit:
                break
        return picked

    def _drop_from_mempool(self, transactions) -> None:
        for tx in transactions:
            if self.mempool.pop(tx.tx_id, None) is not None:
                remaining = self._pending_per_sender.get(tx.sender, 0) - 1
                if remaining > 0:
                    self._pending_per_sender[tx.sender] = remaining
                else:
                    self._pending_per_sender.pop(tx.sender, None)

    # -- mining --------------------------------------------------------------

    def tip(self) -> Block:
        return self.blocks[-1]

    def height(self) -> int:
        return self.tip().height

    def mine_block(
        self,
        pending: Optional[list[Transaction]] = None,
        difficulty: Optional[int] = None,
        parent: Optional[Block] = None,
        timestamp: Optional[int] = None,
        cancel: Optional[threading.Event] = None,
    ) -> Optional[Block]:
        """Assemble, execute, and PoW-seal a block on top of ``parent``
        (default: current tip). Returns None only when cancelled."""
        with self._lock:
            parent = parent or self.tip()
            if parent.block_hash != self.tip().block_hash:
                raise LedgerError("mining parent is not the current tip")
            txs = tuple(self._select_pending() if pending is None else pending)
            timestamp = parent.timestamp + 1 if timestamp is None else timestamp
            difficulty = self.difficulty if difficulty is None else difficulty
            executed = execute_transactions(self.state, txs, parent.height + 1, self.schedule)
            if executed is None:
                raise LedgerError("mempool produced an invalid block body")
            draft = Block(
                parent=parent.block_hash,
                height=parent.height + 1,
                timestamp=timestamp,
                difficulty=difficulty,
                tx_root=transactions_root(txs),
                state_root=executed.state.state_root(),
                logs_root=logs_commitment(self.log_records + executed.log_records),
                nonce=0,
                transactions=txs,
            )
        found = search_nonce(draft.header_prefix(), difficulty, cancel=cancel)
        if found is None:
            return None
        nonce, _ = found
        block = Block(
            parent=draft.parent,
            height=draft.height,
            timestamp=draft.timestamp,
            difficulty=draft.difficulty,
            tx_root=draft.tx_root,
            state_root=draft.state_root,
            logs_root=draft.logs_root,
            nonce=nonce,
            transactions=draft.transactions,
        )
        self._remember_execution(block.block_hash, executed)
        return block

    def mine_round(self, timestamp: Optional[int] = None) -> Optional[Block]:
        """Mine and apply one block from the local mempool."""
        block = self.mine_block(timestamp=timestamp)
        if block is not None:
            reason = self.apply_block(block)
            if reason is not None:
                raise LedgerError(f"self-mined block rejected: {reason}")
        return block

    # -- validation / application ------------------------------------------

    def verify_block(self, block: Block, parent: Block, parent_state: Optional[ChainState] = None,
                     parent_logs: Optional[list[LogRecord]] = None) -> Optional[str]:
        """None when the block is acceptable on ``parent``; otherwise a
        reject reason. Never raises on malformed content."""
        try:
            if block.parent != parent.block_hash or block.height != parent.height + 1:
                return "BadParent"
            if block.difficulty != self.difficulty:
                return "BadDifficulty"
            if not meets_difficulty(block.block_hash, block.difficulty):
                return "BadProof"
            if block.tx_root != transactions_root(block.transactions):
                return "BadTxRoot"
            if parent_state is None:
                resolved = self._state_for(parent)
                if resolved is None:
                    return "BadParent"
                parent_state, parent_logs = resolved
            executed = execute_transactions(parent_state, block.transactions, block.height, self.schedule)
            if executed is None:
                return "BadTransaction"
            if executed.state.state_root() != block.state_root:
                return "BadStateRoot"
            if logs_commitment((parent_logs or []) + executed.log_records) != block.logs_root:
                return "BadLogsRoot"
            self._remember_execution(block.block_hash, executed)
            return None
        except Exception:
            return "Malformed"

    def _remember_execution(self, block_hash: bytes, executed: ExecutedBlock) -> None:
        if len(self._exec_cache) > 64:
            self._exec_cache.clear()
        self._exec_cache[block_hash] = executed

    def _state_for(self, block: Block) -> Optional[tuple[ChainState, list[LogRecord]]]:
        """State and cumulative logs as of ``block`` (canonical fast path,
        replay for side chains)."""
        if block.block_hash == self.tip().block_hash:
            return self.state, self.log_records
        if block.block_hash in self._state_cache:
            return self._state_cache[block.block_hash]
        chain = self._chain_to(block)
        if chain is None:
            return None
        state, records = self._replay(chain)
        self._state_cache[block.block_hash] = (state, records)
        return state, records

    def _chain_to(self, block: Block) -> Optional[list[Block]]:
        chain = [block]
        cursor = block
        while cursor.height > 0:
            cursor = self.known_blocks.get(cursor.parent)
            if cursor is None:
                return None
            chain.append(cursor)
        chain.reverse()
        if chain[0].block_hash != self.genesis_block.block_hash:
            return None
        return chain

    def _replay(self, chain: list[Block]) -> tuple[ChainState, list[LogRecord]]:
        state = self._genesis_state()
        records: list[LogRecord] = []
        for block in chain[1:]:
            executed = execute_transactions(state, block.transactions, block.height, self.schedule)
            if executed is None:
                raise LedgerError("replay hit an invalid block")
            state = executed.state
            records.extend(executed.log_records)
        return state, records

    def _genesis_state(self) -> ChainState:
        return self._pristine_genesis_state.copy()

    def apply_block(self, block: Block) -> Optional[str]:
        """Verify against the current tip and advance. Returns a reject
        reason or None."""
        with self._lock:
            if block.block_hash in self._exec_cache:
                # Already executed here (self-mined or just verified);
                # only the structural checks remain.
                if block.parent != self.tip().block_hash or block.height != self.tip().height + 1:
                    return "BadParent"
                if block.difficulty != self.difficulty:
                    return "BadDifficulty"
                if not meets_difficulty(block.block_hash, block.difficulty):
                    return "BadProof"
            else:
                reason = self.verify_block(block, self.tip(), self.state, self.log_records)
                if reason is not None:
                    return reason
            executed = self._exec_cache.pop(block.block_hash)
            self.blocks.append(block)
            self.known_blocks[block.block_hash] = block
            self.state = executed.state
            self.log_records = self.log_records + executed.log_records
            for i, receipt in enumerate(executed.receipts):
                self.receipts[receipt.tx_id] = (block.height, receipt)
            self._drop_from_mempool(block.transactions)
            self._prune_mempool()
            return None

    def _prune_mempool(self) -> None:
        # After a block lands, pending entries whose nonce the new state
        # already passed are stale and leave the pool.
        stale = [
            tx_id
            for tx_id, tx in self.mempool.items()
            if tx.nonce < self.state.nonces.get(tx.sender, 0)
        ]
        for tx_id in stale:
            tx = self.mempool.pop(tx_id)
            remaining = self._pending_per_sender.get(tx.sender, 0) - 1
            if remaining > 0:
                self._pending_per_sender[tx.sender] = remaining
            else:
                self._pending_per_sender.pop(tx.sender, None)

    def consider_block(self, block: Block) -> bool:
        """Fork-choice entry point for blocks arriving off the wire.
        Returns True when the canonical chain changed."""
        with self._lock:
            if block.block_hash in self.known_blocks:
                return False
            if block.parent == self.tip().block_hash:
                if self.apply_block(block) is None:
                    return True
                return False
            # Side chain: remember it, then see whether it now wins.
            parent = self.known_blocks.get(block.parent)
            if parent is None:
                return False
            resolved = self._state_for(parent)
            if resolved is None:
                return False
            reason = self.verify_block(block, parent, resolved[0], resolved[1])
            if reason is not None:
                return False
            self.known_blocks[block.block_hash] = block
            candidate = self._chain_to(block)
            if candidate is None:
                return False
            try:
                winner = resolve_fork(self.blocks, candidate)
            except IncompatibleGenesis:
                return False
            if winner is self.blocks:
                return False
            # Finality guard: the lower-hash tie-break only settles
            # shallow ties. A fork that would replace a block already
            # confirm_depth-deep must be strictly longer to win.
            if len(candidate) <= len(self.blocks):
                divergence = self._divergence_height(candidate)
                if self.height() - divergence >= self.confirm_depth:
                    return False
            self._reorg_to(candidate)
            return True

    def _divergence_height(self, candidate: list[Block]) -> int:
        limit = min(len(self.blocks), len(candidate))
        for i in range(limit):
            if self.blocks[i].block_hash != candidate[i].block_hash:
                return i
        return limit

    def _reorg_to(self, chain: list[Block]) -> None:
        # Full replay from genesis rebuilds state, logs, and receipts;
        # desk-scale chains keep this cheap.
        self.blocks = list(chain)
        self.receipts = {}
        running = self._genesis_state()
        records: list[LogRecord] = []
        for block in chain[1:]:
            executed = execute_transactions(running, block.transactions, block.height, self.schedule)
            if executed is None:
                raise LedgerError("reorg replay hit an invalid block")
            running = executed.state
            records.extend(executed.log_records)
            for receipt in executed.receipts:
                self.receipts[receipt.tx_id] = (block.height, receipt)
        self.state = running
        self.log_records = records
        self._prune_mempool()

    # -- queries -------------------------------------------------------------

    def get_receipt(self, tx_id: bytes) -> Optional[Receipt]:
        found = self.receipts.get(tx_id)
        return found[1] if found else None

    def receipt_depth(self, tx_id: bytes) -> Optional[int]:
        found = self.receipts.get(tx_id)
        if found is None:
            return None
        return self.height() - found[0]

    def query_logs(self, emitter: Optional[Address] = None, topics: tuple = (), max_height: Optional[int] = None) -> list[LogEntry]:
        """All canonical log entries matching the emitter and every
        supplied topic positionally (None entries are wildcards)."""
        if len(topics) > MAX_LOG_TOPICS:
            raise TooManyTopics(f"filters carry at most {MAX_LOG_TOPICS} topics, got {len(topics)}")
        out = []
        for rec in self.log_records:
            if max_height is not None and rec.height > max_height:
                continue
            entry = rec.entry
            if emitter is not None and entry.emitter != emitter:
                continue
            if any(
                wanted is not None and (pos >= len(entry.topics) or entry.topics[pos] != wanted)
                for pos, wanted in enumerate(topics)
            ):
                continue
            out.append(entry)
        return out

    def snapshot(self) -> tuple[tuple[Block, ...], ChainState]:
        with self._lock:
            return tuple(self.blocks), self.state

    def state_at(self, height: int) -> tuple[ChainState, list[LogRecord]]:
        with self._lock:
            if height >= self.height():
                return self.state, self.log_records
            if height < 0:
                height = 0
            block = self.blocks[height]
            resolved = self._state_for(block)
            if resolved is None:
                raise LedgerError(f"no state for height {height}")
            return resolved

    def registry_view(self, contract: Address, confirmations: int = 0) -> Optional[RegistryView]:
        """Registry read view at ``confirmations`` blocks below the tip,
        reconstructed through the mode's own channel."""
        with self._lock:
            height = self.height() - confirmations
            if height < 0:
                return None
            state, _ = self.state_at(height)
            account = state.contracts.get(contract)
            if account is None:
                return None
            if account.mode == StorageMode.VARIABLES:
                return RegistryView.from_slots(account)
            entries = self.query_logs(emitter=contract, max_height=height)
            return RegistryView.from_logs(entries)
