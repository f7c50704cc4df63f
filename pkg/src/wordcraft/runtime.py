"""Injectable clock and id sources.

Live deployments use wall-clock time and random ids. Mock-provider mode swaps
in stepping/sequential implementations so that a scripted run produces the
same bytes every time.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class IdFactory(Protocol):
    def new_id(self, prefix: str) -> str: ...


class SystemClock:
    def now_ms(self) -> int:
        return int(time.time() * 1000)


class SteppingClock:
    """Deterministic clock: starts at ``start`` and advances ``step`` per call."""

    def __init__(self, start: int = 0, step: int = 1000) -> None:
        self._next = start
        self._step = step
        self._lock = threading.Lock()

    def now_ms(self) -> int:
        with self._lock:
            value = self._next
            self._next += self._step
        return value


class RandomIds:
    def new_id(self, prefix: str) -> str:
        return f"{prefix}-{uuid.uuid4().hex[:12]}"


class SequentialIds:
    """Deterministic ids: ``prefix-0001``, ``prefix-0002``, ... per prefix."""

    def __init__(self) -> None:
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    def new_id(self, prefix: str) -> str:
        with self._lock:
            n = self._counters.get(prefix, 0) + 1
            self._counters[prefix] = n
        return f"{prefix}-{n:04d}"
