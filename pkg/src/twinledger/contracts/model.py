"""Domain records for the twin registry and trust structures."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class StorageMode(Enum):
    """How the registry records its data: contract state slots, or
    indexed transaction-receipt logs."""

    VARIABLES = "variables"
    LOGS = "logs"


class ViewFormat(Enum):
    JSON = "JSON"
    XML = "XML"


DEFAULT_VIEW_FORMAT = ViewFormat.JSON


@dataclass(frozen=True)
class DataView:
    """Trustee-facing rendering parameters for a data stream."""

    streaming_period: int  # seconds between provisioned samples
    view_format: ViewFormat = DEFAULT_VIEW_FORMAT


@dataclass(frozen=True)
class DigitalTwinConfig:
    twin_id: str
    twin_settlor: bytes
    twin_trustee: bytes
    streaming_start: int
    streaming_end: int
    streaming_view: DataView

    def check(self) -> Optional[str]:
        """First violated registration rule, or None."""
        if not self.twin_id:
            return "EmptyTwinId"
        if self.twin_settlor == self.twin_trustee:
            return "SettlorIsTrustee"
        if self.streaming_start > self.streaming_end:
            return "InvalidWindow"
        if self.streaming_view.streaming_period <= 0:
            return "InvalidPeriod"
        return None


@dataclass(frozen=True)
class TrustStructure:
    """Property transfer record: the settlor grants the trustee
    restricted use of one twin."""

    twin: str
    t_settlor: bytes
    t_trustee: bytes


class DenyReason(Enum):
    NO_TRUST = "NoTrust"
    WRONG_TRUSTEE = "WrongTrustee"
    WINDOW_CLOSED = "WindowClosed"


@dataclass(frozen=True)
class Grant:
    config: DigitalTwinConfig

    @property
    def granted(self) -> bool:
        return True


@dataclass(frozen=True)
class Deny:
    reason: DenyReason

    @property
    def granted(self) -> bool:
        return False
