"""Genesis configuration and chain dump/restore.

The genesis file is JSON: static difficulty, pre-registered addresses
(advisory — there is no currency), and node count. Chains persist as
newline-delimited JSON, one block per line, genesis first; restore
replays and re-verifies every block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .node import ChainState, Node
from .types import Block, IncompatibleGenesis, LedgerError, merkle_root, transactions_root

GENESIS_PARENT = b"\x00" * 32


@dataclass(frozen=True)
class GenesisSpec:
    difficulty: int = 0
    prefunded: tuple[str, ...] = ()  # hex addresses
    n_nodes: int = 3
    max_block_txs: int = 20
    timestamp: int = 0

    def to_json_dict(self) -> dict:
        return {
            "difficulty": self.difficulty,
            "prefunded": list(self.prefunded),
            "nodes": self.n_nodes,
            "max_block_txs": self.max_block_txs,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GenesisSpec":
        return cls(
            difficulty=int(obj.get("difficulty", 0)),
            prefunded=tuple(obj.get("prefunded", [])),
            n_nodes=int(obj.get("nodes", 3)),
            max_block_txs=int(obj.get("max_block_txs", 20)),
            timestamp=int(obj.get("timestamp", 0)),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "GenesisSpec":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def genesis_state(spec: GenesisSpec) -> ChainState:
    state = ChainState()
    for addr_hex in spec.prefunded:
        state.nonces[bytes.fromhex(addr_hex)] = 0
    return state


def genesis_block(spec: GenesisSpec) -> Block:
    state = genesis_state(spec)
    return Block(
        parent=GENESIS_PARENT,
        height=0,
        timestamp=spec.timestamp,
        difficulty=spec.difficulty,
        tx_root=transactions_root(()),
        state_root=state.state_root(),
        logs_root=merkle_root([]),
        nonce=0,
        transactions=(),
    )


def make_node(spec: GenesisSpec, node_id: int = 0) -> Node:
    return Node(
        genesis_block(spec),
        genesis_state(spec),
        max_block_txs=spec.max_block_txs,
        node_id=node_id,
    )


def dump_chain(blocks, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for block in blocks:
            fh.write(block.to_json_line() + "\n")
    tmp.replace(path)


def load_chain(path) -> list[Block]:
    blocks = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                blocks.append(Block.from_json_dict(json.loads(line)))
    return blocks


def restore_node(path, spec: GenesisSpec, max_block_txs: Optional[int] = None) -> Node:
    """Rebuild a node from a chain dump, verifying linkage, PoW, and all
    three roots block by block."""
    blocks = load_chain(path)
    if not blocks:
        raise LedgerError("empty chain dump")
    node = make_node(spec)
    if max_block_txs is not None:
        node.max_block_txs = max_block_txs
    if blocks[0].block_hash != node.genesis_block.block_hash:
        raise IncompatibleGenesis("dump genesis does not match the genesis spec")
    for block in blocks[1:]:
        reason = node.apply_block(block)
        if reason is not None:
            raise LedgerError(f"chain dump rejected at height {block.height}: {reason}")
    return node
