"""Gas accounting.

Every receipt's gas is ``tx_base`` plus the sum of per-operation
charges, each a pure function of the schedule. The log and transaction
base costs (375 / 21000) follow the public Ethereum constants; the
remaining entries use the conventional magnitudes for storage writes,
updates, and deployment.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class GasSchedule:
    tx_base: int = 21_000
    log_base: int = 375
    log_topic: int = 375
    log_data_byte: int = 8
    sstore_set: int = 20_000
    sstore_update: int = 5_000
    deploy_base: int = 32_000
    code_byte: int = 200

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"gas schedule entry {f.name} must be positive")

    def log_cost(self, n_topics: int, n_data_bytes: int) -> int:
        return self.log_base + n_topics * self.log_topic + n_data_bytes * self.log_data_byte

    def sstore_cost(self, fresh_slots: int = 0, updated_slots: int = 0) -> int:
        return fresh_slots * self.sstore_set + updated_slots * self.sstore_update

    def deploy_cost(self, definition_bytes: int) -> int:
        return self.deploy_base + definition_bytes * self.code_byte


def charge(schedule: GasSchedule, op_kind: str, **shape: int) -> int:
    """Cost of one operation kind for a given payload shape.

    Kinds: ``tx``, ``log(topics, data_bytes)``, ``sstore_set(slots)``,
    ``sstore_update(slots)``, ``deploy(definition_bytes)``.
    """
    if op_kind == "tx":
        return schedule.tx_base
    if op_kind == "log":
        return schedule.log_cost(shape.get("topics", 0), shape.get("data_bytes", 0))
    if op_kind == "sstore_set":
        return schedule.sstore_cost(fresh_slots=shape.get("slots", 1))
    if op_kind == "sstore_update":
        return schedule.sstore_cost(updated_slots=shape.get("slots", 1))
    if op_kind == "deploy":
        return schedule.deploy_cost(shape.get("definition_bytes", 0))
    raise ValueError(f"unknown gas op kind: {op_kind}")
