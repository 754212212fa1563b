from twinledger.crypto import (
    Keypair,
    address_from_public_key,
    contract_address,
    verify_signature,
)


def test_seeded_keypair_is_deterministic():
    a = Keypair.from_seed(b"alpha")
    b = Keypair.from_seed(b"alpha")
    assert a.public_key == b.public_key
    assert a.address == b.address
    assert len(a.address) == 32


def test_distinct_seeds_distinct_addresses():
    addresses = {Keypair.from_seed(f"k{i}".encode()).address for i in range(200)}
    assert len(addresses) == 200


def test_sign_verify_round_trip():
    kp = Keypair.from_seed(b"signer")
    message = b"state transition"
    sig = kp.sign(message)
    assert verify_signature(kp.public_key, message, sig)
    assert not verify_signature(kp.public_key, message + b"!", sig)


def test_any_single_flipped_signature_byte_fails():
    # Oracle: tampering is checked against the verifier itself, byte by byte.
    kp = Keypair.from_seed(b"tamper")
    message = b"payload"
    sig = kp.sign(message)
    for i in range(len(sig)):
        bad = bytearray(sig)
        bad[i] ^= 0x01
        assert not verify_signature(kp.public_key, message, bytes(bad))


def test_address_binds_public_key():
    kp = Keypair.from_seed(b"bind")
    assert address_from_public_key(kp.public_key) == kp.address
    other = Keypair.from_seed(b"other")
    assert address_from_public_key(other.public_key) != kp.address


def test_contract_address_varies_with_nonce_and_deployer():
    kp = Keypair.from_seed(b"deployer")
    other = Keypair.from_seed(b"deployer2")
    assert contract_address(kp.address, 0) != contract_address(kp.address, 1)
    assert contract_address(kp.address, 0) != contract_address(other.address, 0)
    assert len(contract_address(kp.address, 0)) == 32
