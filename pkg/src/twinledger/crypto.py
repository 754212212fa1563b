"""Keys, signatures, and 32-byte address derivation.

One hash primitive (sha256) backs block hashes, transaction ids, and
addresses. Accounts sign with Ed25519; an address is the hash of the
public key, so distinct keys map to distinct addresses.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from .encoding import enc_u64, tagged_hash

DIGEST_SIZE = 32

ACCOUNT_TAG = b"addr/account"
CONTRACT_TAG = b"addr/contract"


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def address_from_public_key(public_key: bytes) -> bytes:
    return tagged_hash(ACCOUNT_TAG, public_key)


def contract_address(deployer: bytes, nonce: int) -> bytes:
    # Creation tuple (deployer, nonce): redeploying yields a fresh address.
    return tagged_hash(CONTRACT_TAG, deployer + enc_u64(nonce))


def verify_signature(public_key: bytes, message: bytes, signature: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


@dataclass
class Keypair:
    """Ed25519 signer plus its derived ledger address."""

    _private: Ed25519PrivateKey
    public_key: bytes = field(init=False)
    address: bytes = field(init=False)

    def __post_init__(self) -> None:
        self.public_key = self._private.public_key().public_bytes(
            Encoding.Raw, PublicFormat.Raw
        )
        self.address = address_from_public_key(self.public_key)

    @classmethod
    def generate(cls) -> "Keypair":
        return cls(Ed25519PrivateKey.generate())

    @classmethod
    def from_seed(cls, seed: bytes) -> "Keypair":
        """Deterministic keypair; any seed is stretched to 32 bytes."""
        material = seed if len(seed) == 32 else sha256(seed)
        return cls(Ed25519PrivateKey.from_private_bytes(material))

    def sign(self, message: bytes) -> bytes:
        return self._private.sign(message)


def random_nonce(size: int = 16) -> bytes:
    return os.urandom(size)
