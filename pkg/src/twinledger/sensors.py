"""Simulated perception-layer resources.

Each resource emits one reading per tick on a fixed interval, generated
deterministically from its seed, so every window read is reproducible.
Twins pull windows on demand; nothing here keeps history beyond the
generator's own memo, and nothing here listens on any network surface.
"""

from __future__ import annotations

import json
import math
import random
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

SINUSOID_CYCLE_TICKS = 96  # one full cycle per 96 ticks (daily at 15-min ticks)


class Waveform(Enum):
    CONSTANT = "constant"
    SINUSOID = "sinusoid"
    RANDOM_WALK = "random-walk"


class DuplicateId(Exception):
    pass


class BadWindow(Exception):
    pass


@dataclass(frozen=True)
class SensorSample:
    resource_id: str
    timestamp: int
    value: float


@dataclass(frozen=True)
class ResourceSpec:
    resource_id: str
    waveform: Waveform = Waveform.CONSTANT
    base: float = 0.0
    amplitude: float = 1.0
    tick_interval: int = 60
    seed: int = 0
    unit: str = "units"

    def __post_init__(self):
        if self.tick_interval <= 0:
            raise ValueError("tick interval must be positive")

    def to_json_dict(self) -> dict:
        return {
            "resource_id": self.resource_id,
            "waveform": self.waveform.value,
            "base": self.base,
            "amplitude": self.amplitude,
            "tick_interval": self.tick_interval,
            "seed": self.seed,
            "unit": self.unit,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ResourceSpec":
        return cls(
            resource_id=obj["resource_id"],
            waveform=Waveform(obj.get("waveform", "constant")),
            base=float(obj.get("base", 0.0)),
            amplitude=float(obj.get("amplitude", 1.0)),
            tick_interval=int(obj.get("tick_interval", 60)),
            seed=int(obj.get("seed", 0)),
            unit=obj.get("unit", "units"),
        )


class VirtualSensor:
    """Deterministic reading generator for one resource."""

    def __init__(self, spec: ResourceSpec):
        self.spec = spec
        self._walk: list[float] = [spec.base]
        self._rng = random.Random(spec.seed)
        self._lock = threading.Lock()

    def value_at_tick(self, tick: int) -> float:
        spec = self.spec
        if spec.waveform == Waveform.CONSTANT:
            return spec.base
        if spec.waveform == Waveform.SINUSOID:
            return spec.base + spec.amplitude * math.sin(2 * math.pi * tick / SINUSOID_CYCLE_TICKS)
        with self._lock:
            while len(self._walk) <= tick:
                step = self._rng.uniform(-spec.amplitude, spec.amplitude)
                self._walk.append(self._walk[-1] + step)
            return self._walk[tick]

    def read_window(self, start: int, end: int) -> list[SensorSample]:
        """Every tick reading inside [start, end], strictly increasing,
        spaced exactly one tick interval apart."""
        if start > end:
            raise BadWindow(f"window start {start} is after end {end}")
        interval = self.spec.tick_interval
        first = -(-start // interval)  # ceil division
        last = end // interval
        return [
            SensorSample(self.spec.resource_id, tick * interval, self.value_at_tick(tick))
            for tick in range(first, last + 1)
        ]


class SensorFleet:
    """The harness's resource registry; ids are unique."""

    def __init__(self):
        self._sensors: dict[str, VirtualSensor] = {}

    def spawn(self, spec: ResourceSpec) -> VirtualSensor:
        if spec.resource_id in self._sensors:
            raise DuplicateId(f"resource {spec.resource_id!r} already exists")
        sensor = VirtualSensor(spec)
        self._sensors[spec.resource_id] = sensor
        return sensor

    def get(self, resource_id: str) -> Optional[VirtualSensor]:
        return self._sensors.get(resource_id)

    def ids(self) -> list[str]:
        return sorted(self._sensors)

    @classmethod
    def from_config(cls, specs: list[dict]) -> "SensorFleet":
        fleet = cls()
        for obj in specs:
            fleet.spawn(ResourceSpec.from_json_dict(obj))
        return fleet

    @classmethod
    def from_config_file(cls, path) -> "SensorFleet":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data.get("resources", [])
        return cls.from_config(data)
