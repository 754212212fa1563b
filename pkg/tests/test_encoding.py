import pytest
from hypothesis import given
from hypothesis import strategies as st

from twinledger.encoding import (
    DecodeError,
    enc_bytes,
    enc_str,
    enc_u8,
    enc_u16,
    enc_u64,
    expect_end,
    read_bytes,
    read_str,
    read_u8,
    read_u16,
    read_u64,
    tagged_hash,
)


@given(st.integers(0, 255))
def test_u8_round_trip(value):
    buf = enc_u8(value)
    assert len(buf) == 1
    decoded, off = read_u8(buf, 0)
    assert decoded == value and off == 1


@given(st.integers(0, 2**16 - 1))
def test_u16_round_trip(value):
    decoded, off = read_u16(enc_u16(value), 0)
    assert decoded == value and off == 2


@given(st.integers(0, 2**64 - 1))
def test_u64_round_trip(value):
    decoded, off = read_u64(enc_u64(value), 0)
    assert decoded == value and off == 8


@given(st.binary(max_size=200))
def test_bytes_round_trip(data):
    decoded, off = read_bytes(enc_bytes(data), 0)
    assert decoded == data
    expect_end(enc_bytes(data), off)


@given(st.text(max_size=100))
def test_str_round_trip(text):
    decoded, _ = read_str(enc_str(text), 0)
    assert decoded == text


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        enc_u8(256)
    with pytest.raises(ValueError):
        enc_u64(-1)
    with pytest.raises(ValueError):
        enc_u64(2**64)


def test_truncated_bytes_raise():
    buf = enc_bytes(b"hello")
    with pytest.raises(DecodeError):
        read_bytes(buf[:-1], 0)
    with pytest.raises(DecodeError):
        read_u64(b"\x00\x01", 0)
    with pytest.raises(DecodeError):
        expect_end(buf + b"!", len(buf))


def test_bad_utf8_raises():
    with pytest.raises(DecodeError):
        read_str(enc_bytes(b"\xff\xfe"), 0)


def test_tagged_hash_domain_separation():
    payload = b"same payload"
    assert tagged_hash(b"a", payload) != tagged_hash(b"b", payload)
    # The length prefix keeps tag/payload boundaries unambiguous.
    assert tagged_hash(b"ab", b"c") != tagged_hash(b"a", b"bc")
    assert len(tagged_hash(b"t", payload)) == 32
