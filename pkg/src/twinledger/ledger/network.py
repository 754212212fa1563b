"""Deterministic in-process network of chain nodes.

No sockets: a message bus delivers blocks between node state machines,
with optional link partitions for fork experiments. Block production is
round-robin — one designated miner per round — which keeps runs
reproducible while preserving the full PoW cost.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Optional

from .genesis import GenesisSpec, genesis_block, genesis_state
from .node import Node
from .types import Block, Transaction


class SimulatedNetwork:
    def __init__(self, spec: GenesisSpec, n_nodes: Optional[int] = None, auto_deliver: bool = True):
        count = spec.n_nodes if n_nodes is None else n_nodes
        if count < 1:
            raise ValueError("a network needs at least one node")
        self.spec = spec
        self.nodes = [
            Node(genesis_block(spec), genesis_state(spec), max_block_txs=spec.max_block_txs, node_id=i)
            for i in range(count)
        ]
        self.auto_deliver = auto_deliver
        self._queue: deque[tuple[int, int, Block]] = deque()
        self._blocked_links: set[frozenset] = set()
        self._next_miner = 0

    # -- transactions --------------------------------------------------------

    def submit(self, tx: Transaction, node: int = 0) -> bytes:
        """Submit through one node; the pool gossips to reachable peers."""
        tx_id = self.nodes[node].submit_transaction(tx)
        for peer in self.nodes:
            if peer.node_id != node and self._linked(node, peer.node_id):
                try:
                    peer.submit_transaction(tx)
                except Exception:
                    pass  # peer may already have it via another path
        return tx_id

    # -- mining rounds ---------------------------------------------------------

    def mine_round(self, timestamp: Optional[int] = None, miner: Optional[int] = None) -> Block:
        """The designated miner seals one block and broadcasts it."""
        if miner is None:
            miner = self._next_miner
            self._next_miner = (self._next_miner + 1) % len(self.nodes)
        node = self.nodes[miner]
        block = node.mine_round(timestamp=timestamp)
        self.broadcast(block, source=miner)
        return block

    def run_until_clear(self, extra_blocks: int = 0, max_rounds: int = 100_000) -> int:
        """Mine rounds until every mempool drains, then ``extra_blocks``
        more for confirmation depth. Returns blocks mined."""
        mined = 0
        while any(n.pending_count() for n in self.nodes):
            self.mine_round()
            mined += 1
            if mined > max_rounds:
                raise RuntimeError("network failed to drain its mempools")
        for _ in range(extra_blocks):
            self.mine_round()
            mined += 1
        return mined

    # -- delivery ---------------------------------------------------------------

    def broadcast(self, block: Block, source: int) -> None:
        for peer in self.nodes:
            if peer.node_id == source:
                continue
            if self.auto_deliver and self._linked(source, peer.node_id):
                peer.consider_block(block)
            else:
                self._queue.append((source, peer.node_id, block))

    def flush(self) -> None:
        """Deliver every queued message whose link is up (quiescence)."""
        undeliverable: deque = deque()
        while self._queue:
            src, dst, block = self._queue.popleft()
            if self._linked(src, dst):
                self.nodes[dst].consider_block(block)
            else:
                undeliverable.append((src, dst, block))
        self._queue = undeliverable

    def partition(self, a: int, b: int) -> None:
        self._blocked_links.add(frozenset((a, b)))

    def heal(self) -> None:
        self._blocked_links.clear()
        self.flush()

    def _linked(self, a: int, b: int) -> bool:
        return frozenset((a, b)) not in self._blocked_links

    # -- inspection ---------------------------------------------------------------

    def tips(self) -> list[bytes]:
        return [n.tip().block_hash for n in self.nodes]

    def converged(self) -> bool:
        return len(set(self.tips())) == 1


class MiningWorker:
    """Dedicated mining thread, cancellable when a competing block wins
    the round."""

    def __init__(self, node: Node):
        self.node = node
        self.cancel = threading.Event()
        self.result: Optional[Block] = None
        self._thread = threading.Thread(target=self._run, daemon=True)

    def _run(self) -> None:
        self.result = self.node.mine_block(cancel=self.cancel)

    def start(self) -> "MiningWorker":
        self._thread.start()
        return self

    def stop(self) -> Optional[Block]:
        self.cancel.set()
        self._thread.join()
        return self.result

    def join(self, timeout: Optional[float] = None) -> Optional[Block]:
        self._thread.join(timeout)
        return self.result
