"""Network model: TCP session rate law and max-min fair sharing.

A single TCP session over a long fat pipe is window-limited: it cannot move
more than one effective window per round trip. On top of that per-session
ceiling, concurrent sessions share link capacity and host CPU budgets by
max-min fairness (water-filling).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .engine import ConfigError, rational


@dataclass(frozen=True)
class NetPath:
    """One direction of a route: latency, capacity, and residual loss."""

    name: str
    rtt: Fraction          # round-trip time, seconds
    capacity: Fraction     # bottleneck link capacity, bytes/second
    loss_rate: Fraction = Fraction(0)   # fraction of packets lost
    loss_penalty: Fraction = Fraction(0)  # fractional rate reduction per unit loss

    def __post_init__(self):
        if self.rtt <= 0:
            raise ConfigError(f"path {self.name!r}: rtt must be positive")
        if self.capacity <= 0:
            raise ConfigError(f"path {self.name!r}: capacity must be positive")


@dataclass(frozen=True)
class Endpoint:
    """A host NIC as seen by TCP: socket buffer and a CPU-bound copy rate."""

    host: str
    tcp_buffer: Fraction   # bytes
    cpu_cap: Fraction      # bytes/second the host can push through one stream


@dataclass(frozen=True)
class TcpSession:
    path: NetPath
    sender: Endpoint
    receiver: Endpoint

    @property
    def effective_window(self) -> Fraction:
        """Usable window: the smaller of the two socket buffers."""
        return min(self.sender.tcp_buffer, self.receiver.tcp_buffer)


@dataclass
class FlowSet:
    """Sessions competing for one shared path."""

    path: NetPath
    sessions: list[TcpSession] = field(default_factory=list)


def path(name: str, rtt, capacity, loss_rate=0, loss_penalty=0) -> NetPath:
    return NetPath(name, rational(rtt), rational(capacity),
                   rational(loss_rate), rational(loss_penalty))


def endpoint(host: str, tcp_buffer, cpu_cap) -> Endpoint:
    return Endpoint(host, rational(tcp_buffer), rational(cpu_cap))


def session_rate_unconstrained(s: TcpSession) -> Fraction:
    """Steady-state rate of one session with the path to itself.

    min(window/rtt, sender CPU, receiver CPU, link capacity), derated
    multiplicatively when the path carries residual loss.
    """
    rate = min(
        s.effective_window / s.path.rtt,
        s.sender.cpu_cap,
        s.receiver.cpu_cap,
        s.path.capacity,
    )
    if s.path.loss_rate > 0 and s.path.loss_penalty > 0:
        derate = Fraction(1) - s.path.loss_rate * s.path.loss_penalty
        rate *= max(derate, Fraction(0))
    return rate


def fair_share(caps: list[Fraction], capacity: Fraction) -> list[Fraction]:
    """Max-min fair split of one capacity among flows with individual ceilings.

    Iterative water-filling: give every unfrozen flow an equal share of the
    remaining capacity; flows whose ceiling is below that share are frozen at
    the ceiling and the surplus is redistributed.
    """
    n = len(caps)
    alloc: list[Fraction | None] = [None] * n
    active = list(range(n))
    remaining = capacity
    while active:
        share = remaining / len(active)
        saturated = [i for i in active if caps[i] <= share]
        if not saturated:
            for i in active:
                alloc[i] = share
            break
        for i in saturated:
            alloc[i] = caps[i]
            remaining -= caps[i]
        active = [i for i in active if i not in set(saturated)]
    return [a if a is not None else Fraction(0) for a in alloc]


def water_fill(flows: FlowSet) -> list[Fraction]:
    """Allocate the shared path among sessions, max-min fair.

    Each session's ceiling is its unconstrained solo rate; the sum of
    allocations never exceeds path capacity.
    """
    caps = [session_rate_unconstrained(s) for s in flows.sessions]
    return fair_share(caps, flows.path.capacity)


def max_min_allocation(
    caps: list[Fraction],
    usage: list[dict[str, int]],
    capacities: dict[str, Fraction],
) -> list[Fraction]:
    """Progressive-filling max-min allocation over several shared resources.

    Flow i has ceiling caps[i] and consumes usage[i][r] units of resource r
    per byte/s of allocated rate (a relay flow crosses a NIC twice, so its
    coefficient there is 2). All flow rates rise together; a flow stops at
    its ceiling, and when a resource fills, every flow using it freezes.
    """
    n = len(caps)
    alloc: list[Fraction | None] = [None] * n
    active = set(range(n))
    used: dict[str, Fraction] = {r: Fraction(0) for r in capacities}

    def saturation_level(r: str) -> Fraction | None:
        """Smallest common level at which resource r fills, or None if it never does."""
        users = [(caps[i], Fraction(usage[i].get(r, 0))) for i in active if usage[i].get(r, 0)]
        if not users:
            return None
        budget = capacities[r] - used[r]
        if budget < 0:
            budget = Fraction(0)
        # demand(level) = sum(a * min(cap, level)) is piecewise linear and
        # nondecreasing; walk its breakpoints.
        users.sort()
        level = Fraction(0)
        demand = Fraction(0)
        slope = sum(a for _, a in users)
        k = 0
        while k < len(users):
            cap_k = users[k][0]
            step = demand + slope * (cap_k - level)
            if step >= budget:
                break
            demand = step
            level = cap_k
            while k < len(users) and users[k][0] == cap_k:
                slope -= users[k][1]
                k += 1
        else:
            return None  # all users hit their ceilings before r fills
        if slope == 0:
            return None
        return level + (budget - demand) / slope

    while active:
        levels = {r: saturation_level(r) for r in capacities}
        levels = {r: v for r, v in levels.items() if v is not None}
        if not levels:
            for i in active:
                alloc[i] = caps[i]
            break
        level = min(levels.values())
        bottlenecks = {r for r, v in levels.items() if v == level}
        frozen = {i for i in active
                  if any(usage[i].get(r, 0) for r in bottlenecks)}
        for i in frozen:
            alloc[i] = min(caps[i], level)
            for r, a in usage[i].items():
                used[r] += a * alloc[i]
        active -= frozen
        # flows whose ceiling is below the stop level are finished too
        for i in list(active):
            if caps[i] <= level:
                alloc[i] = caps[i]
                for r, a in usage[i].items():
                    used[r] += a * caps[i]
                active.discard(i)
    return [a if a is not None else Fraction(0) for a in alloc]


def netperf_sweep(
    buffers: list[Fraction],
    paths: list[NetPath],
    client: Endpoint,
    server: Endpoint,
) -> list[tuple[str, Fraction, Fraction]]:
    """Single-stream rate per (path, socket buffer): (path name, buffer, bytes/s).

    Both endpoints run with the swept buffer, as a benchmark would set it, so
    the effective window equals the buffer.
    """
    if not buffers:
        raise ConfigError("netperf sweep needs at least one buffer size")
    rows = []
    for p in paths:
        for b in buffers:
            b = rational(b)
            session = TcpSession(
                p,
                Endpoint(server.host, b, server.cpu_cap),
                Endpoint(client.host, b, client.cpu_cap),
            )
            rows.append((p.name, b, session_rate_unconstrained(session)))
    return rows


def parallel_stream_aggregate(
    p: NetPath,
    window: Fraction,
    n_streams: int,
    client: Endpoint,
    server: Endpoint,
) -> Fraction:
    """Aggregate rate of n identical parallel streams between two hosts.

    Streams share the link and both hosts' CPU budgets max-min fair; each is
    individually window-limited.
    """
    if n_streams < 1:
        raise ConfigError("n_streams must be >= 1")
    window = rational(window)
    session = TcpSession(
        p,
        Endpoint(server.host, window, server.cpu_cap),
        Endpoint(client.host, window, client.cpu_cap),
    )
    solo = session_rate_unconstrained(session)
    usage = [{f"link:{p.name}": 1, "cpu:server": 1, "cpu:client": 1}] * n_streams
    caps = {
        f"link:{p.name}": p.capacity,
        "cpu:server": server.cpu_cap,
        "cpu:client": client.cpu_cap,
    }
    alloc = max_min_allocation([solo] * n_streams, usage, caps)
    return sum(alloc, Fraction(0))


class RateJitter:
    """Optional deterministic per-flow rate perturbation (off by default).

    A seeded multiplicative wobble for sensitivity studies; amplitude 0
    leaves every rate untouched.
    """

    def __init__(self, seed: int, amplitude):
        import random

        self.amplitude = rational(amplitude)
        self._rng = random.Random(seed)
        self._memo: dict[str, Fraction] = {}

    def apply(self, rate: Fraction, key: str) -> Fraction:
        if self.amplitude == 0:
            return rate
        if key not in self._memo:
            u = Fraction(repr(self._rng.random()))
            self._memo[key] = Fraction(1) + self.amplitude * (2 * u - 1)
        return rate * self._memo[key]
