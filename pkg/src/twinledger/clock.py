"""One logical clock shared by sensors, twins, and block timestamps.

Harnesses advance it explicitly, which keeps window arithmetic and
payload bytes reproducible across runs.
"""

from __future__ import annotations

import threading


class SimClock:
    def __init__(self, start: int = 0):
        self._now = int(start)
        self._lock = threading.Lock()

    def now(self) -> int:
        with self._lock:
            return self._now

    def advance(self, seconds: int) -> int:
        if seconds < 0:
            raise ValueError("clock only moves forward")
        with self._lock:
            self._now += int(seconds)
            return self._now

    def set(self, instant: int) -> None:
        with self._lock:
            if instant < self._now:
                raise ValueError("clock only moves forward")
            self._now = int(instant)
