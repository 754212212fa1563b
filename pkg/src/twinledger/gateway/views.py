"""Trustee-facing rendering of sensor windows.

A view keeps only the samples on the provisioning grid — timestamps
inside the window whose offset from the window start is an exact
multiple of the streaming period — and serializes them as JSON (the
default) or XML. Both formats parse back losslessly; payload bytes are
stable across runs.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Sequence

from ..contracts.model import DataView, ViewFormat
from ..sensors import SensorSample


class EmptyWindow(Exception):
    pass


@dataclass(frozen=True)
class Window:
    start: int
    end: int


def filter_samples(samples: Sequence[SensorSample], window: Window, period: int) -> list[SensorSample]:
    if window.start > window.end:
        raise EmptyWindow(f"window start {window.start} after end {window.end}")
    if period <= 0:
        raise ValueError("streaming period must be positive")
    return [
        s
        for s in samples
        if window.start <= s.timestamp <= window.end and (s.timestamp - window.start) % period == 0
    ]


def render_view(
    samples: Sequence[SensorSample],
    view: DataView,
    window: Window,
    twin_id: str = "",
) -> bytes:
    kept = filter_samples(samples, window, view.streaming_period)
    if view.view_format == ViewFormat.XML:
        return _render_xml(kept, view, window, twin_id)
    return _render_json(kept, view, window, twin_id)


def _render_json(samples, view, window, twin_id) -> bytes:
    doc = {
        "twin_id": twin_id,
        "format": view.view_format.value,
        "period": view.streaming_period,
        "window": {"start": window.start, "end": window.end},
        "samples": [{"t": s.timestamp, "v": s.value} for s in samples],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _render_xml(samples, view, window, twin_id) -> bytes:
    # Attributes written by hand in a fixed order: ElementTree sorts or
    # preserves insertion depending on version, and bytes must be stable.
    parts = [
        f'<data_view twin_id="{_xml_escape(twin_id)}" format="{view.view_format.value}" '
        f'period="{view.streaming_period}" window_start="{window.start}" window_end="{window.end}">'
    ]
    for s in samples:
        parts.append(f'<sample t="{s.timestamp}" v="{s.value!r}"/>')
    parts.append("</data_view>")
    return "".join(parts).encode("utf-8")


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


@dataclass(frozen=True)
class ParsedView:
    twin_id: str
    view_format: ViewFormat
    period: int
    window: Window
    samples: tuple[tuple[int, float], ...]


def parse_view(data: bytes) -> ParsedView:
    """Inverse of render_view; format auto-detected from the leading byte."""
    if data.lstrip().startswith(b"<"):
        return _parse_xml(data)
    return _parse_json(data)


def _parse_json(data: bytes) -> ParsedView:
    doc = json.loads(data.decode("utf-8"))
    return ParsedView(
        twin_id=doc["twin_id"],
        view_format=ViewFormat(doc["format"]),
        period=int(doc["period"]),
        window=Window(int(doc["window"]["start"]), int(doc["window"]["end"])),
        samples=tuple((int(s["t"]), float(s["v"])) for s in doc["samples"]),
    )


def _parse_xml(data: bytes) -> ParsedView:
    root = ET.fromstring(data.decode("utf-8"))
    return ParsedView(
        twin_id=root.attrib["twin_id"],
        view_format=ViewFormat(root.attrib["format"]),
        period=int(root.attrib["period"]),
        window=Window(int(root.attrib["window_start"]), int(root.attrib["window_end"])),
        samples=tuple((int(el.attrib["t"]), float(el.attrib["v"])) for el in root.iter("sample")),
    )
