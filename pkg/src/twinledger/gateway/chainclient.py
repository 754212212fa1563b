"""How a twin reaches the chain: an in-process node, or a chain dump.

Both clients answer the same three questions at a configurable
confirmation depth: the latest config for a twin, whether access is
granted right now, and whether a trust links two parties over a twin.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Protocol

from ..contracts.registry import RegistryView
from ..ledger.genesis import GenesisSpec, load_chain, restore_node
from ..ledger.node import Node
from ..ledger.types import LedgerError


class ChainUnreachable(Exception):
    pass


class UnknownTwin(Exception):
    pass


class MismatchedTwin(Exception):
    pass


class ChainClient(Protocol):
    def registry_view(self) -> RegistryView: ...

    def tip_height(self) -> int: ...


class NodeChainClient:
    """View over a live in-process node at ``confirmations`` depth."""

    def __init__(self, node: Node, registry: Optional[bytes] = None, confirmations: int = 3):
        self.node = node
        self.confirmations = confirmations
        self._registry = registry

    def registry_address(self) -> bytes:
        if self._registry is not None:
            return self._registry
        contracts = sorted(self.node.state.contracts)
        if not contracts:
            raise ChainUnreachable("no registry deployed on this chain")
        self._registry = contracts[0]
        return self._registry

    def registry_view(self) -> RegistryView:
        address = self.registry_address()
        try:
            view = self.node.registry_view(address, self.confirmations)
        except LedgerError as exc:
            raise ChainUnreachable(str(exc)) from exc
        if view is None:
            if address in self.node.state.contracts:
                # Deployed, but not yet confirmations-deep: nothing is
                # confirmed from its history, so serve an empty view.
                return RegistryView([], {}, {})
            raise ChainUnreachable("no registry at the confirmed height")
        return view

    def tip_height(self) -> int:
        return self.node.height()


class ChainFileClient(NodeChainClient):
    """Chain dump (newline-delimited JSON blocks) restored into a local
    node, fully re-verified."""

    def __init__(self, path, genesis: Optional[GenesisSpec] = None,
                 registry: Optional[bytes] = None, confirmations: int = 3):
        path = Path(path)
        if not path.exists():
            raise ChainUnreachable(f"chain dump not found: {path}")
        try:
            if genesis is None:
                blocks = load_chain(path)
                if not blocks:
                    raise ChainUnreachable(f"empty chain dump: {path}")
                genesis = GenesisSpec(
                    difficulty=blocks[0].difficulty, timestamp=blocks[0].timestamp
                )
            node = restore_node(path, genesis)
        except ChainUnreachable:
            raise
        except Exception as exc:
            raise ChainUnreachable(f"cannot restore chain from {path}: {exc}") from exc
        super().__init__(node, registry=registry, confirmations=confirmations)


def fetch_twin_config(client, twin_id: str):
    """Confirmed on-chain config for ``twin_id``, with the twin identity
    check: the stored id must equal the requested one."""
    view = client.registry_view()
    config = view.latest_config(twin_id)
    if config is None:
        raise UnknownTwin(f"no on-chain configuration for twin {twin_id!r}")
    if config.twin_id != twin_id:
        raise MismatchedTwin(f"chain returned config for {config.twin_id!r}, wanted {twin_id!r}")
    return config
