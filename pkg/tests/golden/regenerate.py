"""Regenerates call_vectors.json: the canonical call payload encodings
and their receipts for a fixed scripted sequence in both storage modes.

Run from the repository root after any deliberate encoding or gas
change:

    python tests/golden/regenerate.py
"""

import json
from pathlib import Path

from twinledger.contracts.abi import (
    encode_register_trust,
    encode_revoke_trust,
    encode_set_twin,
    encode_store_trust_values,
    encode_transfer_property,
)
from twinledger.contracts.gas import GasSchedule
from twinledger.contracts.model import DataView, DigitalTwinConfig, StorageMode, ViewFormat
from twinledger.contracts.registry import deploy, execute_call
from twinledger.crypto import Keypair
from twinledger.encoding import tagged_hash

OUT = Path(__file__).parent / "call_vectors.json"
REGISTRY_ADDR = b"\xaa" * 32


def main() -> None:
    schedule = GasSchedule()
    settlor = Keypair.from_seed(b"golden-settlor")
    trustee = Keypair.from_seed(b"golden-trustee")
    trustee2 = Keypair.from_seed(b"golden-trustee-2")
    config = DigitalTwinConfig(
        twin_id="twin001",
        twin_settlor=settlor.address,
        twin_trustee=trustee.address,
        streaming_start=1_700_000_040,
        streaming_end=1_700_003_640,
        streaming_view=DataView(60, ViewFormat.JSON),
    )
    script = [
        ("set_twin", settlor, encode_set_twin(config)),
        ("register_trust", settlor, encode_register_trust("twin001", trustee.address)),
        ("transfer_property", settlor, encode_transfer_property("twin001", trustee2.address)),
        ("revoke_trust", settlor, encode_revoke_trust("twin001")),
        (
            "store_trust_values",
            settlor,
            encode_store_trust_values(
                settlor.address, trustee.address, tagged_hash(b"golden/twin", b"twin001")
            ),
        ),
        # Guard violation on purpose: a trustee may not register twins.
        ("set_twin", trustee, encode_set_twin(config)),
    ]

    vectors = {}
    for mode in StorageMode:
        account, deploy_gas = deploy(mode, schedule)
        calls = []
        for op, sender, payload in script:
            result = execute_call(account, REGISTRY_ADDR, sender.address, payload, schedule)
            calls.append(
                {
                    "op": op,
                    "sender": sender.address.hex(),
                    "payload": payload.hex(),
                    "status": "reverted" if result.reverted else "success",
                    "gas_used": result.gas_used,
                    "output": result.output.hex(),
                    "log_topics": [t.hex() for log in result.logs for t in log.topics],
                }
            )
        vectors[mode.value] = {"deploy_gas": deploy_gas, "calls": calls}

    OUT.write_text(json.dumps(vectors, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
