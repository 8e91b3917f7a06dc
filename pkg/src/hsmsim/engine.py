"""Deterministic discrete-event engine: virtual clock, ordered event queue, entity registry.

Simulation time is an exact rational number of seconds (`fractions.Fraction`),
so identical inputs produce bit-identical event traces on any platform and
closed-form durations survive the round trip through the engine unchanged.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

SimTime = Fraction


class ConfigError(ValueError):
    """Invalid configuration or operation arguments (negative delay, bad scenario value)."""


class InternalError(RuntimeError):
    """Engine invariant violated; the run is aborted."""


def rational(x: int | float | str | Fraction) -> Fraction:
    """Convert a number to an exact Fraction.

    Floats go through their shortest decimal repr, so rational(3.5e-3) is
    7/2000 rather than the nearest binary float. This keeps configured
    decimal constants exact in the clock arithmetic.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True, order=True)
class Event:
    """A scheduled delivery: totally ordered by (fire_at, seq)."""

    fire_at: SimTime
    seq: int
    target: str = field(compare=False)
    payload: Any = field(compare=False)


Handler = Callable[["Engine", Event], None]


class Engine:
    """Single-threaded event loop over a (fire_at, seq) ordered queue.

    Ties at equal timestamps resolve in schedule order (FIFO) via the seq
    counter. One engine instance per run; no shared mutable state between
    runs.
    """

    def __init__(self, trace: bool = False):
        self.now: SimTime = Fraction(0)
        self._queue: list[Event] = []
        self._seq = 0
        self._cancelled: set[int] = set()
        self._handlers: dict[str, Handler] = {}
        self._finalized = False
        self.scheduled = 0
        self.delivered = 0
        self.cancelled = 0
        self.trace: list[tuple[SimTime, int, str, Any]] | None = [] if trace else None

    def register(self, entity: str, handler: Handler) -> None:
        if entity in self._handlers:
            raise ConfigError(f"entity {entity!r} already registered")
        self._handlers[entity] = handler

    def schedule(self, delay, target: str, payload: Any) -> int:
        """Enqueue an event at now + delay; returns the event id for cancel()."""
        if self._finalized:
            raise ConfigError("engine already finalized")
        d = rational(delay)
        if d < 0:
            raise ConfigError(f"negative delay {delay!r}")
        ev = Event(self.now + d, self._seq, target, payload)
        self._seq += 1
        self.scheduled += 1
        heapq.heappush(self._queue, ev)
        return ev.seq

    def cancel(self, event_id: int) -> None:
        self._cancelled.add(event_id)
        self.cancelled += 1

    def run_until_idle(self) -> SimTime:
        """Deliver events in order until the queue drains; returns the final clock."""
        while self._queue:
            ev = heapq.heappop(self._queue)
            if ev.seq in self._cancelled:
                self._cancelled.discard(ev.seq)
                continue
            if ev.fire_at < self.now:
                raise InternalError(f"event {ev.seq} scheduled into the past")
            self.now = ev.fire_at
            handler = self._handlers.get(ev.target)
            if handler is None:
                raise InternalError(f"no handler registered for entity {ev.target!r}")
            if self.trace is not None:
                self.trace.append((ev.fire_at, ev.seq, ev.target, ev.payload))
            self.delivered += 1
            handler(self, ev)
        self._finalized = True
        return self.now
