"""Shared builders for ledger-level tests."""

from twinledger.contracts.abi import (
    encode_deploy,
    encode_register_trust,
    encode_set_twin,
    encode_store_trust_values,
)
from twinledger.contracts.model import DataView, DigitalTwinConfig, StorageMode, ViewFormat
from twinledger.crypto import Keypair
from twinledger.encoding import tagged_hash
from twinledger.ledger.genesis import GenesisSpec, make_node
from twinledger.ledger.types import sign_transaction


def fresh_node(difficulty=0, max_block_txs=20, prefunded=()):
    return make_node(
        GenesisSpec(difficulty=difficulty, n_nodes=1, max_block_txs=max_block_txs, prefunded=prefunded)
    )


def deploy_registry(node, deployer: Keypair, mode=StorageMode.VARIABLES, nonce=0):
    tx = sign_transaction(deployer, None, encode_deploy(mode), nonce)
    node.submit_transaction(tx)
    node.mine_round()
    receipt = node.get_receipt(tx.tx_id)
    return receipt.output, receipt


def twin_config(twin_id, settlor: Keypair, trustee: Keypair, start=0, end=3600,
                period=60, view_format=ViewFormat.JSON):
    return DigitalTwinConfig(
        twin_id=twin_id,
        twin_settlor=settlor.address,
        twin_trustee=trustee.address,
        streaming_start=start,
        streaming_end=end,
        streaming_view=DataView(period, view_format),
    )


def set_twin_tx(settlor: Keypair, registry, config, nonce):
    return sign_transaction(settlor, registry, encode_set_twin(config), nonce)


def register_trust_tx(settlor: Keypair, registry, twin_id, trustee: Keypair, nonce):
    return sign_transaction(settlor, registry, encode_register_trust(twin_id, trustee.address), nonce)


def store_values_tx(sender: Keypair, registry, nonce, tag=b"x"):
    a = tagged_hash(b"test/value-a", tag)
    b = tagged_hash(b"test/value-b", tag)
    c = tagged_hash(b"test/value-c", tag)
    return sign_transaction(sender, registry, encode_store_trust_values(a, b, c), nonce)
