"""Ledger data model: transactions, blocks, receipts, indexed logs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from ..crypto import address_from_public_key, verify_signature
from ..encoding import (
    enc_bytes,
    enc_u64,
    enc_u8,
    enc_seq,
    tagged_hash,
)

Address = bytes  # 32-byte digest

MAX_LOG_TOPICS = 3

TX_TAG = b"ledger/tx"
TX_SIG_TAG = b"ledger/tx-sig"
HEADER_TAG = b"ledger/header"
LEAF_TAG = b"ledger/leaf"
ROOT_TAG = b"ledger/root"

STATUS_SUCCESS = "success"
STATUS_REVERTED = "reverted"


class LedgerError(Exception):
    """Base class for ledger-level failures."""


class BadSignature(LedgerError):
    pass


class StaleNonce(LedgerError):
    pass


class TooManyTopics(LedgerError):
    pass


class IncompatibleGenesis(LedgerError):
    pass


@dataclass(frozen=True)
class LogEntry:
    """One receipt log: up to three searchable topics plus opaque data."""

    emitter: Address
    topics: tuple[bytes, ...]
    data: bytes = b""

    def __post_init__(self):
        if len(self.topics) > MAX_LOG_TOPICS:
            raise TooManyTopics(
                f"log entries carry at most {MAX_LOG_TOPICS} indexed topics, got {len(self.topics)}"
            )
        for t in self.topics:
            if len(t) != 32:
                raise ValueError("log topics must be 32 bytes")

    def encode(self) -> bytes:
        return enc_seq(
            enc_bytes(self.emitter),
            enc_u8(len(self.topics)),
            *(enc_bytes(t) for t in self.topics),
            enc_bytes(self.data),
        )

    def to_json_dict(self) -> dict:
        return {
            "emitter": self.emitter.hex(),
            "topics": [t.hex() for t in self.topics],
            "data": self.data.hex(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LogEntry":
        return cls(
            emitter=bytes.fromhex(obj["emitter"]),
            topics=tuple(bytes.fromhex(t) for t in obj["topics"]),
            data=bytes.fromhex(obj["data"]),
        )


@dataclass(frozen=True)
class Transaction:
    """Signed call carrier. ``target=None`` deploys a contract."""

    sender: Address
    target: Optional[Address]
    payload: bytes
    nonce: int
    public_key: bytes
    signature: bytes

    def signing_digest(self) -> bytes:
        return tagged_hash(TX_SIG_TAG, self._core_bytes())

    def _core_bytes(self) -> bytes:
        return enc_seq(
            enc_bytes(self.sender),
            enc_u8(1 if self.target is not None else 0),
            enc_bytes(self.target if self.target is not None else b""),
            enc_bytes(self.payload),
            enc_u64(self.nonce),
        )

    def encode(self) -> bytes:
        return enc_seq(
            self._core_bytes(),
            enc_bytes(self.public_key),
            enc_bytes(self.signature),
        )

    @cached_property
    def tx_id(self) -> bytes:
        return tagged_hash(TX_TAG, self.encode())

    @cached_property
    def signature_ok(self) -> bool:
        # Cached: the same immutable object circulates between nodes.
        if address_from_public_key(self.public_key) != self.sender:
            return False
        return verify_signature(self.public_key, self.signing_digest(), self.signature)

    def to_json_dict(self) -> dict:
        return {
            "sender": self.sender.hex(),
            "target": self.target.hex() if self.target is not None else None,
            "payload": self.payload.hex(),
            "nonce": self.nonce,
            "public_key": self.public_key.hex(),
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Transaction":
        return cls(
            sender=bytes.fromhex(obj["sender"]),
            target=bytes.fromhex(obj["target"]) if obj["target"] is not None else None,
            payload=bytes.fromhex(obj["payload"]),
            nonce=int(obj["nonce"]),
            public_key=bytes.fromhex(obj["public_key"]),
            signature=bytes.fromhex(obj["signature"]),
        )


def sign_transaction(keypair, target: Optional[Address], payload: bytes, nonce: int) -> Transaction:
    unsigned = Transaction(
        sender=keypair.address,
        target=target,
        payload=payload,
        nonce=nonce,
        public_key=keypair.public_key,
        signature=b"",
    )
    return Transaction(
        sender=unsigned.sender,
        target=unsigned.target,
        payload=unsigned.payload,
        nonce=unsigned.nonce,
        public_key=unsigned.public_key,
        signature=keypair.sign(unsigned.signing_digest()),
    )


@dataclass(frozen=True)
class Receipt:
    tx_id: bytes
    status: str  # success | reverted
    gas_used: int
    logs: tuple[LogEntry, ...] = ()
    output: bytes = b""
    revert_reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_SUCCESS

    def encode(self) -> bytes:
        return enc_seq(
            enc_bytes(self.tx_id),
            enc_u8(1 if self.ok else 0),
            enc_u64(self.gas_used),
            enc_u8(len(self.logs)),
            *(enc_bytes(log.encode()) for log in self.logs),
            enc_bytes(self.output),
        )


# Prefixes hoisted out of the (hot) per-record hashing path; the bytes
# are identical to tagged_hash(TAG, payload).
_LEAF_PREFIX = enc_bytes(LEAF_TAG)
_ROOT_PREFIX = enc_bytes(ROOT_TAG)


def leaf_hash(payload: bytes) -> bytes:
    return hashlib.sha256(_LEAF_PREFIX + payload).digest()


def merkle_root(leaves: list[bytes]) -> bytes:
    """Order-sensitive commitment: hash of concatenated leaf hashes."""
    return hashlib.sha256(_ROOT_PREFIX + b"".join(leaves)).digest()


def transactions_root(transactions: tuple[Transaction, ...]) -> bytes:
    return merkle_root([leaf_hash(tx.encode()) for tx in transactions])


@dataclass(frozen=True)
class Block:
    """PoW block. The nonce sits last in the header so miners can reuse
    the serialized prefix across attempts."""

    parent: bytes
    height: int
    timestamp: int
    difficulty: int
    tx_root: bytes
    state_root: bytes
    logs_root: bytes
    nonce: int
    transactions: tuple[Transaction, ...] = ()

    def header_prefix(self) -> bytes:
        return enc_seq(
            enc_bytes(HEADER_TAG),
            enc_bytes(self.parent),
            enc_u64(self.height),
            enc_u64(self.timestamp),
            enc_u64(self.difficulty),
            enc_bytes(self.tx_root),
            enc_bytes(self.state_root),
            enc_bytes(self.logs_root),
        )

    def header_bytes(self) -> bytes:
        return self.header_prefix() + enc_u64(self.nonce)

    @cached_property
    def block_hash(self) -> bytes:
        from .pow import header_hash

        return header_hash(self.header_bytes())

    def to_json_dict(self) -> dict:
        return {
            "parent": self.parent.hex(),
            "height": self.height,
            "timestamp": self.timestamp,
            "difficulty": self.difficulty,
            "tx_root": self.tx_root.hex(),
            "state_root": self.state_root.hex(),
            "logs_root": self.logs_root.hex(),
            "nonce": self.nonce,
            "transactions": [tx.to_json_dict() for tx in self.transactions],
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Block":
        return cls(
            parent=bytes.fromhex(obj["parent"]),
            height=int(obj["height"]),
            timestamp=int(obj["timestamp"]),
            difficulty=int(obj["difficulty"]),
            tx_root=bytes.fromhex(obj["tx_root"]),
            state_root=bytes.fromhex(obj["state_root"]),
            logs_root=bytes.fromhex(obj["logs_root"]),
            nonce=int(obj["nonce"]),
            transactions=tuple(
                Transaction.from_json_dict(t) for t in obj["transactions"]
            ),
        )
