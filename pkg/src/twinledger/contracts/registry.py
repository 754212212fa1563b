"""The twin registry: one deterministic contract, two storage channels.

In VARIABLES mode every record lands in 32-byte state slots; in LOGS
mode the same record is emitted as a receipt log with up to three
indexed topics and the remainder as non-indexed data. Both channels
answer the same questions (twin lookup, trust validation), which the
mode-equivalence tests pin down; only the gas differs.

Execution is guard-first: a call validates everything before touching
the account, so a revert leaves state byte-identical and consumes the
transaction base cost only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..encoding import DecodeError, enc_bytes, enc_seq, enc_str, enc_u64, enc_u8, tagged_hash
from ..ledger.types import LogEntry
from .abi import decode_call, decode_twin_record, encode_twin_record
from .gas import GasSchedule
from .model import (
    DataView,
    Deny,
    DenyReason,
    DigitalTwinConfig,
    Grant,
    StorageMode,
)

MAX_SLOT_TEXT = 31  # longer twin ids do not fit one slot and revert

# Event signature topics (first indexed topic of every registry event).
EVENT_TWIN_REGISTRATION = tagged_hash(b"event", b"TwinConfigRegistration(string,address,address,uint,uint,uint,uint8)")
EVENT_TRUST_REGISTRATION = tagged_hash(b"event", b"TwinAccessRegistration(string,address,address)")
EVENT_TRUST_TRANSFER = tagged_hash(b"event", b"TwinAccessTransfer(string,address,address)")
EVENT_TRUST_REVOCATION = tagged_hash(b"event", b"TwinAccessRevocation(string,address)")

REASON_NOT_SETTLOR = "NotSettlor"
REASON_INVALID_WINDOW = "InvalidWindow"
REASON_UNKNOWN_TWIN = "UnknownTwin"
REASON_DUPLICATE_TRUST = "DuplicateTrust"
REASON_NO_ACTIVE_TRUST = "NoActiveTrust"
REASON_TEXT_TOO_LONG = "TextTooLong"
REASON_BAD_CALL = "BadCall"


class NotSettlor(Exception):
    """Read guard: only a twin's settlor may read its registry entry."""


class IndexOutOfRange(Exception):
    pass


class ContractRevert(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def compact_topic(*values: bytes) -> bytes:
    """Folds any number of searchable values into one 32-byte topic, the
    documented fallback once the three-topic cap is hit."""
    return tagged_hash(b"topic/compact", enc_seq(*(enc_bytes(v) for v in values)))


# --- slot layout (VARIABLES mode) -------------------------------------------

TWIN_FIELDS = ("twin_id", "settlor", "trustee", "start", "end", "view")
TRUST_FIELDS = ("twin", "settlor", "trustee")


def twin_slot(index: int, field_name: str) -> bytes:
    return tagged_hash(b"slot/twin", enc_u64(index) + enc_str(field_name))


def trust_slot(settlor: bytes, twin_id: str, field_name: str) -> bytes:
    return tagged_hash(b"slot/trust", enc_bytes(settlor) + enc_str(twin_id) + enc_str(field_name))


def bench_slot(sequence: int, position: int) -> bytes:
    return tagged_hash(b"slot/bench", enc_u64(sequence) + enc_u8(position))


ZERO32 = b"\x00" * 32


def pack_text(text: str) -> bytes:
    raw = text.encode("utf-8")
    if len(raw) > MAX_SLOT_TEXT:
        raise ContractRevert(REASON_TEXT_TOO_LONG)
    return bytes([len(raw)]) + raw + b"\x00" * (MAX_SLOT_TEXT - len(raw))


def unpack_text(slot: bytes) -> str:
    return slot[1 : 1 + slot[0]].decode("utf-8")


def pack_u64(value: int) -> bytes:
    return value.to_bytes(32, "big")


def unpack_u64(slot: bytes) -> int:
    return int.from_bytes(slot, "big")


def pack_view(view: DataView) -> bytes:
    from .abi import _FORMAT_CODE

    return view.streaming_period.to_bytes(31, "big") + bytes([_FORMAT_CODE[view.view_format]])


def unpack_view(slot: bytes) -> DataView:
    from .abi import _FORMAT_FROM_CODE

    return DataView(int.from_bytes(slot[:31], "big"), _FORMAT_FROM_CODE[slot[31]])


# --- contract account ---------------------------------------------------------


@dataclass
class ContractAccount:
    """Registry instance as it lives inside chain state.

    ``slots`` is the commitment-bearing storage. The remaining maps are
    derived indices kept for O(1) guards; they rebuild identically on
    replay because execution is deterministic.
    """

    mode: StorageMode
    definition_size: int
    slots: dict = field(default_factory=dict)
    twins: list = field(default_factory=list)  # list[DigitalTwinConfig]
    twin_latest: dict = field(default_factory=dict)  # twin_id -> index
    trusts: dict = field(default_factory=dict)  # (settlor, twin_id) -> trustee
    bench_sequence: int = 0

    def copy(self) -> "ContractAccount":
        return ContractAccount(
            mode=self.mode,
            definition_size=self.definition_size,
            slots=dict(self.slots),
            twins=list(self.twins),
            twin_latest=dict(self.twin_latest),
            trusts=dict(self.trusts),
            bench_sequence=self.bench_sequence,
        )


@dataclass
class CallResult:
    gas_used: int
    logs: tuple[LogEntry, ...]
    output: bytes
    reverted: bool = False
    revert_reason: Optional[str] = None


def deployment_definition(mode: StorageMode) -> bytes:
    """Canonical serialization of the registry definition for one mode.

    VARIABLES carries struct layouts, the slot table, and guarded
    accessors; LOGS only declares its events, which is what makes its
    deployment markedly cheaper.
    """
    if mode == StorageMode.VARIABLES:
        sections = [
            (b"struct", b"TwinRecord",
             b"twin_id:string;settlor:address;trustee:address;start:uint256;end:uint256;view:DataView"),
            (b"struct", b"DataView", b"period:uint256;format:ViewFormat"),
            (b"struct", b"TrustRecord", b"twin:string;settlor:address;trustee:address"),
            (b"enum", b"ViewFormat", b"JSON,XML;default=JSON"),
            (b"storage", b"twin_records", b"TwinRecord[];one-slot-per-field"),
            (b"storage", b"trust_records", b"map(settlor,twin)=>TrustRecord"),
            (b"slots", b"layout", b"text<=31-bytes-per-slot;u256-one-slot"),
            (b"accessor", b"setDigitalTwin",
             b"in:string,address,address,u256,u256,u256,u8;guard:sender-is-settlor;writes:6-set"),
            (b"accessor", b"getDigitalTwin", b"in:u256;guard:records[i].settlor==sender;reads:6"),
            (b"accessor", b"registerTwinAccess", b"in:string,address;guard:own-twin,no-trust;writes:3-set"),
            (b"accessor", b"transferTwinProperty", b"in:string,address;guard:active-trust;writes:1-update"),
            (b"accessor", b"revokeTwinAccess", b"in:string;guard:active-trust;writes:1-update"),
            (b"accessor", b"storeTrustValues", b"in:address,address,bytes32;writes:3-set"),
            (b"accessor", b"validateTwinAccess", b"in:address,string,u256;view"),
        ]
    else:
        sections = [
            (b"event", b"TwinConfigRegistration",
             b"topics:sig,settlor-ix,trustee-ix;data:twin_id,start,end,period,format"),
            (b"event", b"TwinAccessRegistration", b"topics:sig,settlor-ix,trustee-ix;data:twin"),
            (b"event", b"TwinAccessTransfer", b"topics:sig,settlor-ix,trustee-ix;data:twin"),
            (b"event", b"TwinAccessRevocation", b"topics:sig,settlor-ix;data:twin"),
            (b"event", b"TrustValuesStored", b"topics:settlor,trustee,twin-hash"),
            (b"note", b"reads", b"event-scan-only"),
        ]
    body = enc_seq(*(enc_seq(enc_bytes(kind), enc_bytes(name), enc_bytes(desc)) for kind, name, desc in sections))
    return enc_seq(enc_bytes(b"twin-registry"), enc_u8(0 if mode == StorageMode.VARIABLES else 1), body)


def deploy(mode: StorageMode, schedule: GasSchedule) -> tuple[ContractAccount, int]:
    """Fresh registry account plus the deployment gas beyond tx_base."""
    definition = deployment_definition(mode)
    account = ContractAccount(mode=mode, definition_size=len(definition))
    return account, schedule.deploy_cost(len(definition))


# --- execution ----------------------------------------------------------------


def execute_call(
    account: ContractAccount,
    contract_addr: bytes,
    sender: bytes,
    payload: bytes,
    schedule: GasSchedule,
) -> CallResult:
    """Run one registry call. Mutates ``account`` only on success."""
    try:
        op, args = decode_call(payload)
    except DecodeError:
        return CallResult(schedule.tx_base, (), b"", reverted=True, revert_reason=REASON_BAD_CALL)
    try:
        if op == "set_twin":
            return _set_twin(account, contract_addr, sender, args[0], schedule)
        if op == "register_trust":
            return _register_trust(account, contract_addr, sender, args[0], args[1], schedule)
        if op == "transfer_property":
            return _transfer_property(account, contract_addr, sender, args[0], args[1], schedule)
        if op == "revoke_trust":
            return _revoke_trust(account, contract_addr, sender, args[0], schedule)
        if op == "store_trust_values":
            return _store_trust_values(account, contract_addr, sender, args, schedule)
        return CallResult(schedule.tx_base, (), b"", reverted=True, revert_reason=REASON_BAD_CALL)
    except ContractRevert as rv:
        return CallResult(schedule.tx_base, (), b"", reverted=True, revert_reason=rv.reason)


def _require(condition: bool, reason: str) -> None:
    if not condition:
        raise ContractRevert(reason)


def _set_twin(account, contract_addr, sender, config: DigitalTwinConfig, schedule) -> CallResult:
    _require(sender == config.twin_settlor, REASON_NOT_SETTLOR)
    problem = config.check()
    if problem == "InvalidWindow":
        raise ContractRevert(REASON_INVALID_WINDOW)
    _require(problem is None, problem or REASON_BAD_CALL)

    index = len(account.twins)
    gas = schedule.tx_base
    logs: tuple[LogEntry, ...] = ()
    if account.mode == StorageMode.VARIABLES:
        packed_id = pack_text(config.twin_id)  # reverts before any write if too long
        account.slots[twin_slot(index, "twin_id")] = packed_id
        account.slots[twin_slot(index, "settlor")] = config.twin_settlor
        account.slots[twin_slot(index, "trustee")] = config.twin_trustee
        account.slots[twin_slot(index, "start")] = pack_u64(config.streaming_start)
        account.slots[twin_slot(index, "end")] = pack_u64(config.streaming_end)
        account.slots[twin_slot(index, "view")] = pack_view(config.streaming_view)
        gas += schedule.sstore_cost(fresh_slots=len(TWIN_FIELDS))
    else:
        data = encode_twin_record(config)
        entry = LogEntry(
            emitter=contract_addr,
            topics=(EVENT_TWIN_REGISTRATION, config.twin_settlor, config.twin_trustee),
            data=data,
        )
        logs = (entry,)
        gas += schedule.log_cost(len(entry.topics), len(entry.data))
    account.twins.append(config)
    account.twin_latest[config.twin_id] = index
    return CallResult(gas, logs, enc_u64(index))


def _register_trust(account, contract_addr, sender, twin_id: str, trustee: bytes, schedule) -> CallResult:
    index = account.twin_latest.get(twin_id)
    _require(index is not None, REASON_UNKNOWN_TWIN)
    _require(account.twins[index].twin_settlor == sender, REASON_NOT_SETTLOR)
    _require((sender, twin_id) not in account.trusts, REASON_DUPLICATE_TRUST)

    gas = schedule.tx_base
    logs: tuple[LogEntry, ...] = ()
    if account.mode == StorageMode.VARIABLES:
        packed = pack_text(twin_id)
        account.slots[trust_slot(sender, twin_id, "twin")] = packed
        account.slots[trust_slot(sender, twin_id, "settlor")] = sender
        account.slots[trust_slot(sender, twin_id, "trustee")] = trustee
        gas += schedule.sstore_cost(fresh_slots=len(TRUST_FIELDS))
    else:
        entry = LogEntry(
            emitter=contract_addr,
            topics=(EVENT_TRUST_REGISTRATION, sender, trustee),
            data=enc_str(twin_id),
        )
        logs = (entry,)
        gas += schedule.log_cost(len(entry.topics), len(entry.data))
    account.trusts[(sender, twin_id)] = trustee
    return CallResult(gas, logs, b"")


def _transfer_property(account, contract_addr, sender, twin_id: str, new_trustee: bytes, schedule) -> CallResult:
    index = account.twin_latest.get(twin_id)
    _require(index is not None, REASON_UNKNOWN_TWIN)
    _require(account.twins[index].twin_settlor == sender, REASON_NOT_SETTLOR)
    _require((sender, twin_id) in account.trusts, REASON_NO_ACTIVE_TRUST)

    gas = schedule.tx_base
    logs: tuple[LogEntry, ...] = ()
    if account.mode == StorageMode.VARIABLES:
        account.slots[trust_slot(sender, twin_id, "trustee")] = new_trustee
        gas += schedule.sstore_cost(updated_slots=1)
    else:
        entry = LogEntry(
            emitter=contract_addr,
            topics=(EVENT_TRUST_TRANSFER, sender, new_trustee),
            data=enc_str(twin_id),
        )
        logs = (entry,)
        gas += schedule.log_cost(len(entry.topics), len(entry.data))
    account.trusts[(sender, twin_id)] = new_trustee
    return CallResult(gas, logs, b"")


def _revoke_trust(account, contract_addr, sender, twin_id: str, schedule) -> CallResult:
    index = account.twin_latest.get(twin_id)
    _require(index is not None, REASON_UNKNOWN_TWIN)
    _require(account.twins[index].twin_settlor == sender, REASON_NOT_SETTLOR)
    _require((sender, twin_id) in account.trusts, REASON_NO_ACTIVE_TRUST)

    gas = schedule.tx_base
    logs: tuple[LogEntry, ...] = ()
    if account.mode == StorageMode.VARIABLES:
        account.slots[trust_slot(sender, twin_id, "trustee")] = ZERO32
        gas += schedule.sstore_cost(updated_slots=1)
    else:
        entry = LogEntry(
            emitter=contract_addr,
            topics=(EVENT_TRUST_REVOCATION, sender),
            data=enc_str(twin_id),
        )
        logs = (entry,)
        gas += schedule.log_cost(len(entry.topics), len(entry.data))
    del account.trusts[(sender, twin_id)]
    return CallResult(gas, logs, b"")


def _store_trust_values(account, contract_addr, sender, values: tuple, schedule) -> CallResult:
    """The three-value benchmark write: settlor hash, trustee hash, twin
    hash. Three fresh slots in VARIABLES; one log whose three values are
    the three indexed topics (and nothing else) in LOGS."""
    settlor, trustee, twin_hash = values
    for v in (settlor, trustee, twin_hash):
        _require(len(v) == 32, REASON_BAD_CALL)

    gas = schedule.tx_base
    logs: tuple[LogEntry, ...] = ()
    seq = account.bench_sequence
    if account.mode == StorageMode.VARIABLES:
        account.slots[bench_slot(seq, 0)] = settlor
        account.slots[bench_slot(seq, 1)] = trustee
        account.slots[bench_slot(seq, 2)] = twin_hash
        gas += schedule.sstore_cost(fresh_slots=3)
    else:
        entry = LogEntry(emitter=contract_addr, topics=(settlor, trustee, twin_hash), data=b"")
        logs = (entry,)
        gas += schedule.log_cost(len(entry.topics), len(entry.data))
    account.bench_sequence = seq + 1
    return CallResult(gas, logs, enc_u64(seq))


# --- authoritative read views --------------------------------------------------


@dataclass
class RegistryView:
    """Read-side reconstruction of the registry.

    Built from state slots in VARIABLES mode and from the receipt-log
    stream in LOGS mode; both answer get/validate identically.
    """

    twins: list
    twin_latest: dict
    trusts: dict

    @classmethod
    def from_slots(cls, account: ContractAccount) -> "RegistryView":
        twins: list[DigitalTwinConfig] = []
        twin_latest: dict[str, int] = {}
        index = 0
        while twin_slot(index, "twin_id") in account.slots:
            config = DigitalTwinConfig(
                twin_id=unpack_text(account.slots[twin_slot(index, "twin_id")]),
                twin_settlor=account.slots[twin_slot(index, "settlor")],
                twin_trustee=account.slots[twin_slot(index, "trustee")],
                streaming_start=unpack_u64(account.slots[twin_slot(index, "start")]),
                streaming_end=unpack_u64(account.slots[twin_slot(index, "end")]),
                streaming_view=unpack_view(account.slots[twin_slot(index, "view")]),
            )
            twins.append(config)
            twin_latest[config.twin_id] = index
            index += 1
        trusts: dict[tuple[bytes, str], bytes] = {}
        for (settlor, twin_id) in {(c.twin_settlor, c.twin_id) for c in twins}:
            trustee = account.slots.get(trust_slot(settlor, twin_id, "trustee"))
            if trustee is not None and trustee != ZERO32:
                trusts[(settlor, twin_id)] = trustee
        return cls(twins, twin_latest, trusts)

    @classmethod
    def from_logs(cls, entries: Iterable[LogEntry]) -> "RegistryView":
        twins: list[DigitalTwinConfig] = []
        twin_latest: dict[str, int] = {}
        trusts: dict[tuple[bytes, str], bytes] = {}
        for entry in entries:
            if not entry.topics:
                continue
            signature = entry.topics[0]
            if signature == EVENT_TWIN_REGISTRATION:
                config = decode_twin_record(entry.data, entry.topics[1], entry.topics[2])
                twin_latest[config.twin_id] = len(twins)
                twins.append(config)
            elif signature == EVENT_TRUST_REGISTRATION:
                twin_id = _read_twin_id(entry.data)
                trusts[(entry.topics[1], twin_id)] = entry.topics[2]
            elif signature == EVENT_TRUST_TRANSFER:
                twin_id = _read_twin_id(entry.data)
                trusts[(entry.topics[1], twin_id)] = entry.topics[2]
            elif signature == EVENT_TRUST_REVOCATION:
                twin_id = _read_twin_id(entry.data)
                trusts.pop((entry.topics[1], twin_id), None)
        return cls(twins, twin_latest, trusts)

    def get_digital_twin(self, caller: bytes, index: int) -> DigitalTwinConfig:
        if not 0 <= index < len(self.twins):
            raise IndexOutOfRange(f"no twin at index {index}")
        config = self.twins[index]
        if config.twin_settlor != caller:
            raise NotSettlor("registry entries are readable by their settlor only")
        return config

    def latest_config(self, twin_id: str) -> Optional[DigitalTwinConfig]:
        index = self.twin_latest.get(twin_id)
        return self.twins[index] if index is not None else None

    def active_trusts(self) -> dict:
        return dict(self.trusts)

    def has_trust(self, settlor: bytes, trustee: bytes, twin_id: str) -> bool:
        return self.trusts.get((settlor, twin_id)) == trustee

    def validate_access(self, trustee: bytes, twin_id: str, now: int):
        """Grant iff a trust matches, the config names the trustee, and
        ``now`` falls inside the streaming window — denied in that order."""
        if not any(
            t_twin == twin_id and granted == trustee
            for (_, t_twin), granted in self.trusts.items()
        ):
            return Deny(DenyReason.NO_TRUST)
        config = self.latest_config(twin_id)
        if config is None or config.twin_trustee != trustee:
            return Deny(DenyReason.WRONG_TRUSTEE)
        if not config.streaming_start <= now <= config.streaming_end:
            return Deny(DenyReason.WINDOW_CLOSED)
        return Grant(config)


def _read_twin_id(data: bytes) -> str:
    from ..encoding import read_str

    twin_id, _ = read_str(data, 0)
    return twin_id
