"""Constrained datagram protocol for twin-to-twin traffic.

A deliberately small request/response scheme with the familiar header
fields — method/response code, 16-bit message id, short token — over
UDP. Wire compatibility with full CoAP stacks is out of scope; the
semantics (token echo, retransmit-with-backoff, dedup by message id)
are what twins need from it.
"""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from ..encoding import (
    DecodeError,
    enc_bytes,
    enc_seq,
    enc_str,
    enc_u16,
    enc_u8,
    expect_end,
    read_bytes,
    read_str,
    read_u16,
    read_u8,
)

# Method and response codes, CoAP-numbered (class << 5 | detail).
CODE_GET = 1
CODE_POST = 2
CODE_CONTENT = (2 << 5) | 5  # 2.05
CODE_BAD_REQUEST = 4 << 5  # 4.00
CODE_UNAUTHORIZED = (4 << 5) | 1  # 4.01
CODE_NOT_FOUND = (4 << 5) | 4  # 4.04

MAX_TOKEN = 8
MESSAGE_TAG = b"coapish/v1"


class PeerUnreachable(Exception):
    pass


class PortUnavailable(Exception):
    pass


@dataclass(frozen=True)
class TwinMessage:
    method: int
    message_id: int
    token: bytes
    path: str
    payload: bytes = b""

    def __post_init__(self):
        if len(self.token) > MAX_TOKEN:
            raise ValueError("token longer than 8 bytes")
        if not 0 <= self.message_id < 1 << 16:
            raise ValueError("message id must fit 16 bits")

    def encode(self) -> bytes:
        return enc_seq(
            enc_bytes(MESSAGE_TAG),
            enc_u8(self.method),
            enc_u16(self.message_id),
            enc_bytes(self.token),
            enc_str(self.path),
            enc_bytes(self.payload),
        )

    @classmethod
    def decode(cls, raw: bytes) -> "TwinMessage":
        tag, off = read_bytes(raw, 0)
        if tag != MESSAGE_TAG:
            raise DecodeError("not a twin message")
        method, off = read_u8(raw, off)
        message_id, off = read_u16(raw, off)
        token, off = read_bytes(raw, off)
        path, off = read_str(raw, off)
        payload, off = read_bytes(raw, off)
        expect_end(raw, off)
        return cls(method, message_id, token, path, payload)

    def reply(self, code: int, payload: bytes = b"") -> "TwinMessage":
        # Responses echo the request token.
        return TwinMessage(code, self.message_id, self.token, self.path, payload)


Handler = Callable[[TwinMessage, tuple], Optional[TwinMessage]]


class DatagramEndpoint:
    """UDP endpoint serving one handler; also the client side."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.bind((host, port))
        except OSError as exc:
            self._sock.close()
            raise PortUnavailable(f"cannot bind udp {host}:{port}: {exc}") from exc
        self.address = self._sock.getsockname()
        self._handler: Optional[Handler] = None
        self._thread: Optional[threading.Thread] = None
        self._closing = threading.Event()
        self._dedup: dict[tuple, bytes] = {}
        self._next_message_id = 1
        self._id_lock = threading.Lock()

    def serve(self, handler: Handler) -> "DatagramEndpoint":
        self._handler = handler
        self._thread = threading.Thread(target=self._serve_loop, daemon=True)
        self._thread.start()
        return self

    def _serve_loop(self) -> None:
        self._sock.settimeout(0.1)
        while not self._closing.is_set():
            try:
                raw, peer = self._sock.recvfrom(65535)
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                msg = TwinMessage.decode(raw)
            except (DecodeError, ValueError):
                continue
            key = (peer, msg.message_id)
            if key in self._dedup:
                self._sock.sendto(self._dedup[key], peer)
                continue
            reply = self._handler(msg, peer) if self._handler else None
            if reply is not None:
                encoded = reply.encode()
                if len(self._dedup) > 1024:
                    self._dedup.clear()
                self._dedup[key] = encoded
                self._sock.sendto(encoded, peer)

    def next_message_id(self) -> int:
        with self._id_lock:
            mid = self._next_message_id
            self._next_message_id = (self._next_message_id + 1) % (1 << 16) or 1
            return mid

    def close(self) -> None:
        self._closing.set()
        if self._thread is not None:
            self._thread.join(timeout=1.0)
        self._sock.close()


def request(
    peer: tuple,
    message: TwinMessage,
    retransmits: int = 3,
    base_timeout: float = 0.2,
) -> TwinMessage:
    """Send on a fresh client socket and await the matching reply;
    exponential backoff across the initial send plus ``retransmits``
    resends, then PeerUnreachable."""
    encoded = message.encode()
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        timeout = base_timeout
        for _ in range(retransmits + 1):
            sock.sendto(encoded, peer)
            sock.settimeout(timeout)
            try:
                while True:
                    raw, _sender = sock.recvfrom(65535)
                    try:
                        reply = TwinMessage.decode(raw)
                    except (DecodeError, ValueError):
                        continue
                    if reply.message_id == message.message_id and reply.token == message.token:
                        return reply
            except socket.timeout:
                timeout *= 2
        raise PeerUnreachable(f"no reply from {peer} after {retransmits} retransmits")
    finally:
        sock.close()
