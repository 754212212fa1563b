"""Canonical length-prefixed binary encoding.

Every hashed structure (transactions, block headers, contract call
payloads, commitment leaves) goes through these helpers so byte layouts
are identical across platforms and runs.
"""

from __future__ import annotations

import hashlib


class DecodeError(ValueError):
    """Raised on truncated or malformed canonical bytes."""


def enc_u8(value: int) -> bytes:
    if not 0 <= value < 256:
        raise ValueError(f"u8 out of range: {value}")
    return value.to_bytes(1, "big")


def enc_u16(value: int) -> bytes:
    if not 0 <= value < 1 << 16:
        raise ValueError(f"u16 out of range: {value}")
    return value.to_bytes(2, "big")


def enc_u64(value: int) -> bytes:
    if not 0 <= value < 1 << 64:
        raise ValueError(f"u64 out of range: {value}")
    return value.to_bytes(8, "big")


def enc_bytes(data: bytes) -> bytes:
    # 4-byte big-endian length prefix, then the raw bytes
    return len(data).to_bytes(4, "big") + data


def enc_str(text: str) -> bytes:
    return enc_bytes(text.encode("utf-8"))


def enc_seq(*parts: bytes) -> bytes:
    return b"".join(parts)


def read_u8(buf: bytes, off: int) -> tuple[int, int]:
    if off + 1 > len(buf):
        raise DecodeError("truncated u8")
    return buf[off], off + 1


def read_u16(buf: bytes, off: int) -> tuple[int, int]:
    if off + 2 > len(buf):
        raise DecodeError("truncated u16")
    return int.from_bytes(buf[off : off + 2], "big"), off + 2


def read_u64(buf: bytes, off: int) -> tuple[int, int]:
    if off + 8 > len(buf):
        raise DecodeError("truncated u64")
    return int.from_bytes(buf[off : off + 8], "big"), off + 8


def read_bytes(buf: bytes, off: int) -> tuple[bytes, int]:
    if off + 4 > len(buf):
        raise DecodeError("truncated length prefix")
    n = int.from_bytes(buf[off : off + 4], "big")
    off += 4
    if off + n > len(buf):
        raise DecodeError("truncated bytes field")
    return bytes(buf[off : off + n]), off + n


def read_str(buf: bytes, off: int) -> tuple[str, int]:
    raw, off = read_bytes(buf, off)
    try:
        return raw.decode("utf-8"), off
    except UnicodeDecodeError as exc:
        raise DecodeError("invalid utf-8 in string field") from exc


def expect_end(buf: bytes, off: int) -> None:
    if off != len(buf):
        raise DecodeError(f"{len(buf) - off} trailing bytes")


def tagged_hash(tag: bytes, payload: bytes) -> bytes:
    """Domain-separated sha256; distinct tags can never collide byte-wise."""
    return hashlib.sha256(enc_bytes(tag) + payload).digest()
