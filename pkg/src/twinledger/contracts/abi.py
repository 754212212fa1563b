"""Call payload encoding: one selector byte, then length-prefixed fields.

The exact byte layout is pinned by golden vectors under tests/golden/
so receipts stay bit-stable. See README for the field tables.
"""

from __future__ import annotations

from ..encoding import (
    DecodeError,
    enc_bytes,
    enc_seq,
    enc_str,
    enc_u64,
    enc_u8,
    expect_end,
    read_bytes,
    read_str,
    read_u64,
    read_u8,
)
from .model import DataView, DigitalTwinConfig, StorageMode, ViewFormat

SEL_SET_TWIN = 0x01
SEL_REGISTER_TRUST = 0x02
SEL_TRANSFER_PROPERTY = 0x03
SEL_REVOKE_TRUST = 0x04
SEL_STORE_TRUST_VALUES = 0x05

_FORMAT_CODE = {ViewFormat.JSON: 0, ViewFormat.XML: 1}
_FORMAT_FROM_CODE = {v: k for k, v in _FORMAT_CODE.items()}

_MODE_CODE = {StorageMode.VARIABLES: 0, StorageMode.LOGS: 1}
_MODE_FROM_CODE = {v: k for k, v in _MODE_CODE.items()}


def encode_deploy(mode: StorageMode) -> bytes:
    return enc_u8(_MODE_CODE[mode])


def decode_deploy(payload: bytes) -> StorageMode:
    code, off = read_u8(payload, 0)
    expect_end(payload, off)
    if code not in _MODE_FROM_CODE:
        raise DecodeError(f"unknown storage mode code {code}")
    return _MODE_FROM_CODE[code]


def encode_set_twin(config: DigitalTwinConfig) -> bytes:
    return enc_seq(
        enc_u8(SEL_SET_TWIN),
        enc_str(config.twin_id),
        enc_bytes(config.twin_settlor),
        enc_bytes(config.twin_trustee),
        enc_u64(config.streaming_start),
        enc_u64(config.streaming_end),
        enc_u64(config.streaming_view.streaming_period),
        enc_u8(_FORMAT_CODE[config.streaming_view.view_format]),
    )


def encode_register_trust(twin_id: str, trustee: bytes) -> bytes:
    return enc_seq(enc_u8(SEL_REGISTER_TRUST), enc_str(twin_id), enc_bytes(trustee))


def encode_transfer_property(twin_id: str, new_trustee: bytes) -> bytes:
    return enc_seq(enc_u8(SEL_TRANSFER_PROPERTY), enc_str(twin_id), enc_bytes(new_trustee))


def encode_revoke_trust(twin_id: str) -> bytes:
    return enc_seq(enc_u8(SEL_REVOKE_TRUST), enc_str(twin_id))


def encode_store_trust_values(settlor: bytes, trustee: bytes, twin_hash: bytes) -> bytes:
    return enc_seq(
        enc_u8(SEL_STORE_TRUST_VALUES),
        enc_bytes(settlor),
        enc_bytes(trustee),
        enc_bytes(twin_hash),
    )


def decode_call(payload: bytes) -> tuple[str, tuple]:
    """Returns (operation name, args). Raises DecodeError on bad bytes."""
    if not payload:
        raise DecodeError("empty call payload")
    selector, off = read_u8(payload, 0)
    if selector == SEL_SET_TWIN:
        twin_id, off = read_str(payload, off)
        settlor, off = read_bytes(payload, off)
        trustee, off = read_bytes(payload, off)
        start, off = read_u64(payload, off)
        end, off = read_u64(payload, off)
        period, off = read_u64(payload, off)
        fmt_code, off = read_u8(payload, off)
        expect_end(payload, off)
        if fmt_code not in _FORMAT_FROM_CODE:
            raise DecodeError(f"unknown view format code {fmt_code}")
        config = DigitalTwinConfig(
            twin_id=twin_id,
            twin_settlor=settlor,
            twin_trustee=trustee,
            streaming_start=start,
            streaming_end=end,
            streaming_view=DataView(period, _FORMAT_FROM_CODE[fmt_code]),
        )
        return "set_twin", (config,)
    if selector == SEL_REGISTER_TRUST:
        twin_id, off = read_str(payload, off)
        trustee, off = read_bytes(payload, off)
        expect_end(payload, off)
        return "register_trust", (twin_id, trustee)
    if selector == SEL_TRANSFER_PROPERTY:
        twin_id, off = read_str(payload, off)
        trustee, off = read_bytes(payload, off)
        expect_end(payload, off)
        return "transfer_property", (twin_id, trustee)
    if selector == SEL_REVOKE_TRUST:
        twin_id, off = read_str(payload, off)
        expect_end(payload, off)
        return "revoke_trust", (twin_id,)
    if selector == SEL_STORE_TRUST_VALUES:
        settlor, off = read_bytes(payload, off)
        trustee, off = read_bytes(payload, off)
        twin_hash, off = read_bytes(payload, off)
        expect_end(payload, off)
        return "store_trust_values", (settlor, trustee, twin_hash)
    raise DecodeError(f"unknown selector 0x{selector:02x}")


def encode_twin_record(config: DigitalTwinConfig) -> bytes:
    """Non-indexed log data carrying everything beyond the topics."""
    return enc_seq(
        enc_str(config.twin_id),
        enc_u64(config.streaming_start),
        enc_u64(config.streaming_end),
        enc_u64(config.streaming_view.streaming_period),
        enc_u8(_FORMAT_CODE[config.streaming_view.view_format]),
    )


def decode_twin_record(data: bytes, settlor: bytes, trustee: bytes) -> DigitalTwinConfig:
    twin_id, off = read_str(data, 0)
    start, off = read_u64(data, off)
    end, off = read_u64(data, off)
    period, off = read_u64(data, off)
    fmt_code, off = read_u8(data, off)
    expect_end(data, off)
    return DigitalTwinConfig(
        twin_id=twin_id,
        twin_settlor=settlor,
        twin_trustee=trustee,
        streaming_start=start,
        streaming_end=end,
        streaming_view=DataView(period, _FORMAT_FROM_CODE[fmt_code]),
    )
