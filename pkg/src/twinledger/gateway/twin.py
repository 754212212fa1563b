"""The digital twin runtime.

One instance per (twin, trustee) pairing: it pulls its configuration
from the chain, verifies identities, reads the bound virtual resource,
and provisions the trustee's customized view. Third parties only ever
talk to the twin — the resource has no network surface at all.

Endpoints per instance:
    http://<host>:<port>/http_api/talk_to_third_party?from=&to=
    http://<host>:<port>/http_api/talk_to_bc
    udp  <host>:<coap port>  path /coap_api/talk_to_dt

Twins hold no sample history; every request reads the resource afresh.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from ..clock import SimClock
from ..contracts.model import Deny, DigitalTwinConfig
from ..crypto import Keypair, address_from_public_key, verify_signature
from ..encoding import (
    DecodeError,
    enc_bytes,
    enc_seq,
    enc_str,
    enc_u64,
    expect_end,
    read_bytes,
    read_str,
    read_u64,
    tagged_hash,
)
from ..sensors import VirtualSensor
from . import coap
from .chainclient import ChainUnreachable, MismatchedTwin, UnknownTwin, fetch_twin_config
from .coap import (
    CODE_CONTENT,
    CODE_GET,
    CODE_NOT_FOUND,
    CODE_BAD_REQUEST,
    CODE_UNAUTHORIZED,
    DatagramEndpoint,
    PortUnavailable,
    TwinMessage,
)
from .credentials import BadCredential, ReplayGuard, TrusteeCredential
from .views import EmptyWindow, Window, render_view

THIRD_PARTY_PATH = "/http_api/talk_to_third_party"
CHAIN_PATH = "/http_api/talk_to_bc"
TWIN_TO_TWIN_PATH = "/coap_api/talk_to_dt"

CONFIG_TTL_SECONDS = 10
PEER_REQUEST_TAG = b"gateway/twin-to-twin"


class Unauthorized(Exception):
    pass


def _config_json(config: DigitalTwinConfig) -> bytes:
    doc = {
        "twin_id": config.twin_id,
        "twin_settlor": config.twin_settlor.hex(),
        "twin_trustee": config.twin_trustee.hex(),
        "streaming_start": config.streaming_start,
        "streaming_end": config.streaming_end,
        "streaming_period": config.streaming_view.streaming_period,
        "view_format": config.streaming_view.view_format.value,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def encode_peer_request(requester_twin: str, window: Window, signer: Keypair) -> bytes:
    digest = tagged_hash(
        PEER_REQUEST_TAG,
        enc_seq(enc_str(requester_twin), enc_u64(window.start), enc_u64(window.end)),
    )
    return enc_seq(
        enc_str(requester_twin),
        enc_u64(window.start),
        enc_u64(window.end),
        enc_bytes(signer.public_key),
        enc_bytes(signer.sign(digest)),
    )


def decode_peer_request(payload: bytes) -> tuple[str, Window, bytes]:
    """Returns (requester twin id, window, settlor address); raises
    DecodeError or Unauthorized."""
    twin_id, off = read_str(payload, 0)
    start, off = read_u64(payload, off)
    end, off = read_u64(payload, off)
    public_key, off = read_bytes(payload, off)
    signature, off = read_bytes(payload, off)
    expect_end(payload, off)
    digest = tagged_hash(
        PEER_REQUEST_TAG, enc_seq(enc_str(twin_id), enc_u64(start), enc_u64(end))
    )
    if not verify_signature(public_key, digest, signature):
        raise Unauthorized("peer request signature does not verify")
    return twin_id, Window(start, end), address_from_public_key(public_key)


class TwinInstance:
    """Running twin bound to one chain client and one virtual resource."""

    def __init__(
        self,
        twin_id: str,
        chain,
        resource: VirtualSensor,
        clock: SimClock,
        signer: Optional[Keypair] = None,
        host: str = "127.0.0.1",
        http_port: int = 0,
        coap_port: int = 0,
        config_ttl: int = CONFIG_TTL_SECONDS,
        replay_window: int = 60,
    ):
        self.twin_id = twin_id
        self.chain = chain
        self.resource = resource
        self.clock = clock
        self.signer = signer
        self.config_ttl = config_ttl
        self.replay_window = replay_window
        self._config: Optional[DigitalTwinConfig] = None
        self._config_fetched_at: Optional[int] = None
        self._fetch_lock = threading.Lock()
        self._replay_guard = ReplayGuard(replay_window)

        # No data is served before this first fetch succeeds.
        self.refresh_config()

        self._http = _build_http_server(self, host, http_port)
        self.http_address = self._http.server_address
        try:
            self._udp = DatagramEndpoint(host, coap_port)
        except PortUnavailable:
            self._http.server_close()
            raise
        self._udp.serve(self._handle_datagram)
        self.coap_address = self._udp.address
        self._http_thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        self._http_thread.start()

    # -- configuration ---------------------------------------------------------

    def refresh_config(self) -> DigitalTwinConfig:
        config = fetch_twin_config(self.chain, self.twin_id)
        self._config = config
        self._config_fetched_at = self.clock.now()
        return config

    def current_config(self) -> DigitalTwinConfig:
        """Cached config, refetched when older than the freshness TTL.
        One in-flight refetch; concurrent callers share its result."""
        now = self.clock.now()
        config = self._config
        if config is not None and self._config_fetched_at is not None:
            if now - self._config_fetched_at <= self.config_ttl:
                return config
        with self._fetch_lock:
            now = self.clock.now()
            if self._config is not None and self._config_fetched_at is not None:
                if now - self._config_fetched_at <= self.config_ttl:
                    return self._config
            return self.refresh_config()

    # -- third-party requests -----------------------------------------------------

    def handle_third_party_request(
        self, cred: TrusteeCredential, query_from: Optional[int], query_to: Optional[int]
    ):
        """Returns (status, content_type, body). Deny responses carry the
        reason and zero sensor values."""
        now = self.clock.now()
        try:
            cred.verify(self.twin_id, now, self.replay_window)
            self._replay_guard.check(cred, now)
        except BadCredential as exc:
            return 401, "application/json", _error_body("BadCredential", str(exc))

        # Authorization is checked fresh on every request (a revoked
        # trust must bite immediately); the view parameters come from the
        # TTL-cached config.
        decision = self.chain.registry_view().validate_access(cred.address, self.twin_id, now)
        if isinstance(decision, Deny):
            return 403, "application/json", _error_body("Deny", decision.reason.value)
        config = self.current_config()
        window = Window(
            max(config.streaming_start, query_from if query_from is not None else config.streaming_start),
            min(config.streaming_end, query_to if query_to is not None else config.streaming_end),
        )
        if window.start > window.end:
            return 400, "application/json", _error_body("EmptyWindow", "window start after end")
        samples = self.resource.read_window(window.start, window.end)
        body = render_view(samples, config.streaming_view, window, self.twin_id)
        content_type = (
            "application/xml"
            if config.streaming_view.view_format.value == "XML"
            else "application/json"
        )
        return 200, content_type, body

    def handle_chain_request(self, cred: TrusteeCredential):
        """Cached config as JSON, for the settlor only."""
        now = self.clock.now()
        try:
            cred.verify(self.twin_id, now, self.replay_window)
            self._replay_guard.check(cred, now)
        except BadCredential as exc:
            return 401, "application/json", _error_body("BadCredential", str(exc))
        config = self.current_config()
        if cred.address != config.twin_settlor:
            return 403, "application/json", _error_body("NotSettlor", "settlor-only endpoint")
        return 200, "application/json", _config_json(config)

    # -- twin-to-twin ----------------------------------------------------------------

    def _handle_datagram(self, msg: TwinMessage, peer) -> TwinMessage:
        if msg.path != TWIN_TO_TWIN_PATH:
            return msg.reply(CODE_NOT_FOUND)
        if msg.method != CODE_GET:
            return msg.reply(CODE_BAD_REQUEST)
        try:
            requester_twin, window, requester_settlor = decode_peer_request(msg.payload)
        except (DecodeError, ValueError):
            return msg.reply(CODE_BAD_REQUEST)
        except Unauthorized:
            return msg.reply(CODE_UNAUTHORIZED)
        try:
            self._authorize_peer(requester_twin, requester_settlor)
        except Unauthorized:
            return msg.reply(CODE_UNAUTHORIZED)
        config = self.current_config()
        clamped = Window(
            max(config.streaming_start, window.start), min(config.streaming_end, window.end)
        )
        if clamped.start > clamped.end:
            return msg.reply(CODE_BAD_REQUEST)
        samples = self.resource.read_window(clamped.start, clamped.end)
        body = render_view(samples, config.streaming_view, clamped, self.twin_id)
        return msg.reply(CODE_CONTENT, body)

    def _authorize_peer(self, requester_twin: str, requester_settlor: bytes) -> None:
        """Peers qualify by shared settlor or an explicit on-chain trust
        naming the requester's settlor over this twin."""
        view = self.chain.registry_view()
        peer_config = view.latest_config(requester_twin)
        if peer_config is None or peer_config.twin_settlor != requester_settlor:
            raise Unauthorized("requester twin does not belong to the signing settlor")
        my_config = self.current_config()
        if peer_config.twin_settlor == my_config.twin_settlor:
            return
        if view.has_trust(my_config.twin_settlor, requester_settlor, self.twin_id):
            return
        raise Unauthorized("no shared settlor and no trust link")

    def twin_to_twin(self, peer_address, window: Window, retransmits: int = 3,
                     base_timeout: float = 0.1) -> TwinMessage:
        """GET the peer's own rendered view for ``window``."""
        if self.signer is None:
            raise Unauthorized("twin has no signing identity for peer calls")
        msg = TwinMessage(
            method=CODE_GET,
            message_id=self._udp.next_message_id(),
            token=self._udp.next_message_id().to_bytes(2, "big"),
            path=TWIN_TO_TWIN_PATH,
            payload=encode_peer_request(self.twin_id, window, self.signer),
        )
        return coap.request(peer_address, msg, retransmits=retransmits, base_timeout=base_timeout)

    def composite_view(self, peer_addresses, window: Window) -> bytes:
        """This twin's view plus each peer's own rendered view,
        newline-concatenated in call order."""
        config = self.current_config()
        clamped = Window(
            max(config.streaming_start, window.start), min(config.streaming_end, window.end)
        )
        own = render_view(
            self.resource.read_window(clamped.start, clamped.end),
            config.streaming_view,
            clamped,
            self.twin_id,
        )
        parts = [own]
        for peer in peer_addresses:
            reply = self.twin_to_twin(peer, window)
            if reply.method != CODE_CONTENT:
                raise Unauthorized(f"peer refused composite request (code {reply.method})")
            parts.append(reply.payload)
        return b"\n".join(parts)

    # -- lifecycle ---------------------------------------------------------------------

    def close(self) -> None:
        self._http.shutdown()
        self._http.server_close()
        self._udp.close()


def _error_body(kind: str, detail: str) -> bytes:
    return json.dumps({"error": kind, "detail": detail}, sort_keys=True).encode("utf-8")


def _build_http_server(instance: TwinInstance, host: str, port: int) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # quiet test output
            pass

        def do_GET(self):
            parsed = urlparse(self.path)
            if parsed.path == THIRD_PARTY_PATH:
                self._third_party(parsed)
            elif parsed.path == CHAIN_PATH:
                self._chain()
            else:
                self._send(404, "application/json", _error_body("NotFound", parsed.path))

        def _credential(self):
            return TrusteeCredential.from_headers(self.headers)

        def _third_party(self, parsed):
            try:
                cred = self._credential()
            except BadCredential as exc:
                self._send(401, "application/json", _error_body("BadCredential", str(exc)))
                return
            params = parse_qs(parsed.query)
            query_from = _int_or_none(params.get("from"))
            query_to = _int_or_none(params.get("to"))
            try:
                status, ctype, body = instance.handle_third_party_request(cred, query_from, query_to)
            except (UnknownTwin, MismatchedTwin, ChainUnreachable) as exc:
                status, ctype, body = 502, "application/json", _error_body(type(exc).__name__, str(exc))
            self._send(status, ctype, body)

        def _chain(self):
            try:
                cred = self._credential()
            except BadCredential as exc:
                self._send(401, "application/json", _error_body("BadCredential", str(exc)))
                return
            try:
                status, ctype, body = instance.handle_chain_request(cred)
            except (UnknownTwin, MismatchedTwin, ChainUnreachable) as exc:
                status, ctype, body = 502, "application/json", _error_body(type(exc).__name__, str(exc))
            self._send(status, ctype, body)

        def _send(self, status, ctype, body):
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    try:
        return ThreadingHTTPServer((host, port), Handler)
    except OSError as exc:
        raise PortUnavailable(f"cannot bind http {host}:{port}: {exc}") from exc


def _int_or_none(values) -> Optional[int]:
    if not values:
        return None
    return int(values[0])


def start_twin(
    twin_id: str,
    chain,
    resource: VirtualSensor,
    clock: SimClock,
    **kwargs,
) -> TwinInstance:
    """Fetch the twin's on-chain config and bring up its three
    endpoints. Raises UnknownTwin / ChainUnreachable / PortUnavailable."""
    return TwinInstance(twin_id, chain, resource, clock, **kwargs)
