from .chainclient import (
    ChainFileClient,
    ChainUnreachable,
    MismatchedTwin,
    NodeChainClient,
    UnknownTwin,
    fetch_twin_config,
)
from .coap import (
    CODE_CONTENT,
    CODE_GET,
    CODE_UNAUTHORIZED,
    DatagramEndpoint,
    PeerUnreachable,
    PortUnavailable,
    TwinMessage,
)
from .credentials import BadCredential, ReplayGuard, TrusteeCredential
from .twin import TwinInstance, Unauthorized, start_twin
from .views import EmptyWindow, ParsedView, Window, filter_samples, parse_view, render_view

__all__ = [
    "BadCredential",
    "ChainFileClient",
    "ChainUnreachable",
    "CODE_CONTENT",
    "CODE_GET",
    "CODE_UNAUTHORIZED",
    "DatagramEndpoint",
    "EmptyWindow",
    "MismatchedTwin",
    "NodeChainClient",
    "ParsedView",
    "PeerUnreachable",
    "PortUnavailable",
    "ReplayGuard",
    "TrusteeCredential",
    "TwinInstance",
    "TwinMessage",
    "Unauthorized",
    "UnknownTwin",
    "Window",
    "fetch_twin_config",
    "filter_samples",
    "parse_view",
    "render_view",
    "start_twin",
]
