"""Digital twins with trust structures on a small proof-of-work ledger."""

__version__ = "0.1.0"
