"""Proof-of-work primitive: leading-zero-bit difficulty over the
double-sha256 of the block header."""

from __future__ import annotations

import hashlib
import threading
from typing import Optional

from ..encoding import enc_u64


def header_hash(header_bytes: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(header_bytes).digest()).digest()


def leading_zero_bits(digest: bytes) -> int:
    return 256 - int.from_bytes(digest, "big").bit_length()


def meets_difficulty(digest: bytes, difficulty: int) -> bool:
    return leading_zero_bits(digest) >= difficulty


def search_nonce(
    header_prefix: bytes,
    difficulty: int,
    start_nonce: int = 0,
    cancel: Optional[threading.Event] = None,
    cancel_check_every: int = 512,
) -> Optional[tuple[int, int]]:
    """Scan nonces until header_hash(prefix || nonce) clears the
    difficulty.

    Returns (nonce, attempts), or None when cancelled. Difficulty 0
    accepts the first candidate.
    """
    nonce = start_nonce
    attempts = 0
    sha = hashlib.sha256
    while True:
        attempts += 1
        digest = sha(sha(header_prefix + enc_u64(nonce)).digest()).digest()
        if meets_difficulty(digest, difficulty):
            return nonce, attempts
        nonce += 1
        if cancel is not None and attempts % cancel_check_every == 0 and cancel.is_set():
            return None
