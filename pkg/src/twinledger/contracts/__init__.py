from .gas import GasSchedule, charge
from .model import (
    DataView,
    Deny,
    DenyReason,
    DigitalTwinConfig,
    Grant,
    StorageMode,
    TrustStructure,
    ViewFormat,
)
from .registry import (
    ContractAccount,
    IndexOutOfRange,
    NotSettlor,
    RegistryView,
    compact_topic,
    deployment_definition,
)

__all__ = [
    "ContractAccount",
    "DataView",
    "Deny",
    "DenyReason",
    "DigitalTwinConfig",
    "GasSchedule",
    "Grant",
    "IndexOutOfRange",
    "NotSettlor",
    "RegistryView",
    "StorageMode",
    "TrustStructure",
    "ViewFormat",
    "charge",
    "compact_topic",
    "deployment_definition",
]
