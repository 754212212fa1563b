from .types import (
    Address,
    BadSignature,
    Block,
    IncompatibleGenesis,
    LedgerError,
    LogEntry,
    Receipt,
    StaleNonce,
    TooManyTopics,
    Transaction,
    sign_transaction,
)

# node/network/genesis sit above the contracts layer; load them lazily so
# contracts can import ledger.types without a cycle.
_LAZY = {
    "ChainState": ("twinledger.ledger.node", "ChainState"),
    "Node": ("twinledger.ledger.node", "Node"),
    "resolve_fork": ("twinledger.ledger.node", "resolve_fork"),
    "MiningWorker": ("twinledger.ledger.network", "MiningWorker"),
    "SimulatedNetwork": ("twinledger.ledger.network", "SimulatedNetwork"),
    "GenesisSpec": ("twinledger.ledger.genesis", "GenesisSpec"),
    "dump_chain": ("twinledger.ledger.genesis", "dump_chain"),
    "genesis_block": ("twinledger.ledger.genesis", "genesis_block"),
    "load_chain": ("twinledger.ledger.genesis", "load_chain"),
    "make_node": ("twinledger.ledger.genesis", "make_node"),
    "restore_node": ("twinledger.ledger.genesis", "restore_node"),
}

__all__ = [
    "Address",
    "BadSignature",
    "Block",
    "IncompatibleGenesis",
    "LedgerError",
    "LogEntry",
    "Receipt",
    "StaleNonce",
    "TooManyTopics",
    "Transaction",
    "sign_transaction",
    *sorted(_LAZY),
]


def __getattr__(name):
    if name in _LAZY:
        import importlib

        module, attr = _LAZY[name]
        return getattr(importlib.import_module(module), attr)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
