"""Trustee request credentials: a signed (twin, nonce, timestamp) tuple.

The public key travels with the credential and must hash to the claimed
address; the timestamp must fall inside the replay window and the nonce
must be fresh. Nothing on-chain is needed to check the signature — the
chain only decides afterwards whether this address holds a trust.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from ..crypto import Keypair, address_from_public_key, random_nonce, verify_signature
from ..encoding import enc_bytes, enc_seq, enc_str, enc_u64, tagged_hash

CREDENTIAL_TAG = b"gateway/credential"
REPLAY_WINDOW_SECONDS = 60


class BadCredential(Exception):
    pass


def _signing_digest(twin_id: str, nonce: bytes, timestamp: int) -> bytes:
    return tagged_hash(CREDENTIAL_TAG, enc_seq(enc_str(twin_id), enc_bytes(nonce), enc_u64(timestamp)))


@dataclass(frozen=True)
class TrusteeCredential:
    address: bytes
    public_key: bytes
    nonce: bytes
    timestamp: int
    signature: bytes

    @classmethod
    def issue(cls, keypair: Keypair, twin_id: str, now: int, nonce: bytes | None = None) -> "TrusteeCredential":
        nonce = nonce if nonce is not None else random_nonce()
        return cls(
            address=keypair.address,
            public_key=keypair.public_key,
            nonce=nonce,
            timestamp=now,
            signature=keypair.sign(_signing_digest(twin_id, nonce, now)),
        )

    def verify(self, twin_id: str, now: int, replay_window: int = REPLAY_WINDOW_SECONDS) -> None:
        if address_from_public_key(self.public_key) != self.address:
            raise BadCredential("public key does not match the claimed address")
        if abs(now - self.timestamp) > replay_window:
            raise BadCredential("credential timestamp outside the replay window")
        if not verify_signature(self.public_key, _signing_digest(twin_id, self.nonce, self.timestamp), self.signature):
            raise BadCredential("credential signature does not verify")

    def to_headers(self) -> dict[str, str]:
        return {
            "X-Trustee-Address": self.address.hex(),
            "X-Trustee-Pubkey": self.public_key.hex(),
            "X-Trustee-Nonce": self.nonce.hex(),
            "X-Trustee-Timestamp": str(self.timestamp),
            "X-Trustee-Signature": self.signature.hex(),
        }

    @classmethod
    def from_headers(cls, headers) -> "TrusteeCredential":
        try:
            return cls(
                address=bytes.fromhex(headers["X-Trustee-Address"]),
                public_key=bytes.fromhex(headers["X-Trustee-Pubkey"]),
                nonce=bytes.fromhex(headers["X-Trustee-Nonce"]),
                timestamp=int(headers["X-Trustee-Timestamp"]),
                signature=bytes.fromhex(headers["X-Trustee-Signature"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise BadCredential(f"missing or malformed credential header: {exc}") from exc


class ReplayGuard:
    """Remembers (address, nonce) pairs inside the replay window."""

    def __init__(self, window: int = REPLAY_WINDOW_SECONDS):
        self.window = window
        self._seen: dict[tuple[bytes, bytes], int] = {}
        self._lock = threading.Lock()

    def check(self, cred: TrusteeCredential, now: int) -> None:
        key = (cred.address, cred.nonce)
        with self._lock:
            expired = [k for k, ts in self._seen.items() if now - ts > self.window]
            for k in expired:
                del self._seen[k]
            if key in self._seen:
                raise BadCredential("credential nonce replayed")
            self._seen[key] = now
