"""Transfer protocols: closed-form laws, per-packet machines, and fluid concurrent runs.

Three transfer disciplines share one bottleneck chain model:

* pdata — every packet is solicited by a header round trip, so each packet
  costs rtt + packet/rate. Latency-bound over the WAN.
* pdata-push — one setup round trip, then continuous streaming at the chain
  rate; per-packet latency is gone.
* client API — pdata underneath, with the request unit clamped to
  min(api_buffer, packet); a big API buffer cannot beat the mover's packet.

Concurrent transfers run as fluid flows: each flow's demand is its solo
protocol rate, shared resources (links, host CPUs, NICs) are split max-min
fair, and rates are recomputed at every arrival or departure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from .engine import ConfigError, Engine, InternalError, rational
from .network import (FlowSet, NetPath, TcpSession, fair_share,
                      max_min_allocation, session_rate_unconstrained, water_fill)
from .storage import Disk, disk_stream_rate
from .testbed import Host, Testbed

# --------------------------------------------------------------------------
# protocol kinds


@dataclass(frozen=True)
class MoverPdata:
    packet: Fraction

    def __post_init__(self):
        if self.packet <= 0:
            raise ConfigError("packet must be positive")


@dataclass(frozen=True)
class PdataPush:
    pass


@dataclass(frozen=True)
class Pftp:
    pwidth: int = 1

    def __post_init__(self):
        if self.pwidth < 1:
            raise ConfigError("pwidth must be >= 1")


@dataclass(frozen=True)
class ClientApi:
    buffer: Fraction

    def __post_init__(self):
        if self.buffer <= 0:
            raise ConfigError("buffer must be positive")


ProtocolKind = MoverPdata | PdataPush | Pftp | ClientApi


@dataclass(frozen=True)
class Direct:
    pass


@dataclass(frozen=True)
class Relay:
    via: str


DataPath = Direct | Relay


@dataclass(frozen=True)
class StorageRef:
    """One end of a transfer: a disk, a memory buffer, the null device, or a tape file."""

    kind: str                      # disk | memory | null | tape
    host: str
    disk: Disk | None = None
    file_id: str | None = None

    def __post_init__(self):
        if self.kind not in ("disk", "memory", "null", "tape"):
            raise ConfigError(f"bad storage kind {self.kind!r}")
        if self.kind == "disk" and self.disk is None:
            raise ConfigError("disk endpoint needs a Disk")


@dataclass(frozen=True)
class TransferSpec:
    name: str
    size: Fraction
    source: StorageRef
    sink: StorageRef
    protocol: ProtocolKind
    path: NetPath
    streams: int = 1
    data_path: DataPath = Direct()
    start_at: Fraction = Fraction(0)

    def __post_init__(self):
        if self.size <= 0:
            raise ConfigError(f"transfer {self.name!r}: size must be positive")
        if self.streams < 1:
            raise ConfigError(f"transfer {self.name!r}: streams must be >= 1")


@dataclass(frozen=True)
class PipelineStages:
    """Ordered stage rates a buffer moves through, e.g. [source disk, network, sink disk]."""

    rates: tuple[Fraction, ...]
    mode: str = "serial"           # serial | parallel

    def __post_init__(self):
        if not self.rates:
            raise ConfigError("pipeline needs at least one stage")
        if any(r <= 0 for r in self.rates):
            raise ConfigError("all stage rates must be positive")
        if self.mode not in ("serial", "parallel"):
            raise ConfigError(f"bad overlap mode {self.mode!r}")


# --------------------------------------------------------------------------
# closed forms


def pdata_transfer_time(size, packet, rtt, bottleneck_rate, pipelined: bool = False) -> Fraction:
    """Whole-file pdata time: ceil(size/packet) header-gated packet cycles.

    The pipelined variant (off by default, what-if only) overlaps header
    exchanges with data and pays the round trip once.
    """
    size, packet, rtt, rate = map(rational, (size, packet, rtt, bottleneck_rate))
    if size <= 0 or packet <= 0 or rtt <= 0 or rate <= 0:
        raise ConfigError("pdata_transfer_time: all arguments must be positive")
    n = math.ceil(size / packet)
    if pipelined:
        return rtt + n * (packet / rate)
    return n * (rtt + packet / rate)


def pdata_push_transfer_time(size, rtt, bottleneck_rate) -> Fraction:
    """Push time: one setup round trip, then the file at the bottleneck rate."""
    size, rtt, rate = map(rational, (size, rtt, bottleneck_rate))
    if size <= 0 or rtt <= 0 or rate <= 0:
        raise ConfigError("pdata_push_transfer_time: all arguments must be positive")
    return rtt + size / rate


def pdata_steady_rate(packet, rtt, bottleneck_rate) -> Fraction:
    """Sustained pdata rate: one packet per (rtt + packet/rate) cycle."""
    packet, rtt, rate = map(rational, (packet, rtt, bottleneck_rate))
    return packet / (rtt + packet / rate)


def serial_pipeline_rate(stages: PipelineStages) -> Fraction:
    """Effective rate through ordered stages.

    Serial (no overlap): each buffer crosses the stages one after another, so
    rates combine harmonically, 1/sum(1/r). Parallel (fully overlapped
    streaming): the slowest stage wins.
    """
    if stages.mode == "parallel":
        return min(stages.rates)
    return 1 / sum(Fraction(1) / r for r in stages.rates)


# --------------------------------------------------------------------------
# per-packet event machine


class PdataMachine:
    """Strict request-response pdata executor on the engine.

    Each packet is a header round trip followed by the packet draining at the
    chain rate; nothing is pipelined. Exists to check the event path against
    the closed form, packet by packet.
    """

    def __init__(self, engine: Engine, name: str, size, packet, rtt, bottleneck_rate):
        self.engine = engine
        self.name = name
        self.size = rational(size)
        self.packet = rational(packet)
        self.rtt = rational(rtt)
        self.rate = rational(bottleneck_rate)
        self.packets_total = math.ceil(self.size / self.packet)
        self.packets_done = 0
        self.finished_at: Fraction | None = None
        engine.register(name, self._handle)

    def start(self) -> None:
        self.engine.schedule(self.rtt, self.name, "header_acked")

    def _handle(self, engine: Engine, event) -> None:
        if event.payload == "header_acked":
            engine.schedule(self.packet / self.rate, self.name, "packet_drained")
        elif event.payload == "packet_drained":
            self.packets_done += 1
            if self.packets_done < self.packets_total:
                engine.schedule(self.rtt, self.name, "header_acked")
            else:
                self.finished_at = engine.now
        else:
            raise InternalError(f"pdata machine got {event.payload!r}")


def run_pdata_machine(size, packet, rtt, bottleneck_rate) -> Fraction:
    """Convenience: execute one PdataMachine to completion, return elapsed time."""
    engine = Engine()
    machine = PdataMachine(engine, "pdata", size, packet, rtt, bottleneck_rate)
    machine.start()
    engine.run_until_idle()
    if machine.finished_at is None:
        raise InternalError("pdata machine never finished")
    return machine.finished_at


# --------------------------------------------------------------------------
# solo rate model (per-flow demand)


_INF = Fraction(10**18)


def _storage_rate(ref: StorageRef, testbed: Testbed, disk_streams: dict[str, int]) -> Fraction:
    """Per-stream ceiling of one storage endpoint under current contention."""
    if ref.kind in ("memory", "null"):
        return _INF
    if ref.kind == "tape":
        return testbed.tape.drive_rate
    n = max(1, disk_streams.get(ref.disk.name, 1))
    return disk_stream_rate(ref.disk, n)


def _loss_factor(path: NetPath) -> Fraction:
    if path.loss_rate > 0 and path.loss_penalty > 0:
        return max(Fraction(0), Fraction(1) - path.loss_rate * path.loss_penalty)
    return Fraction(1)


def burst_chain_rate(spec: TransferSpec, testbed: Testbed,
                     disk_streams: dict[str, int] | None = None) -> Fraction:
    """Rate at which one already-solicited buffer drains end to end.

    min(link, both CPUs, both storage endpoints). No window/rtt term: a
    solicited burst is at most one window, so it never stalls on the window,
    and the push pipeline keeps the window full by construction.
    """
    disk_streams = disk_streams or {}
    src = testbed.host(spec.source.host)
    dst = testbed.host(spec.sink.host)
    rate = min(
        spec.path.capacity,
        src.endpoint.cpu_cap,
        dst.endpoint.cpu_cap,
        _storage_rate(spec.source, testbed, disk_streams),
        _storage_rate(spec.sink, testbed, disk_streams),
    )
    return rate * _loss_factor(spec.path)


def window_rate_sum(spec: TransferSpec, testbed: Testbed, pwidth: int) -> Fraction:
    """Summed window-limited allocation of pwidth parallel TCP streams."""
    src = testbed.host(spec.source.host)
    dst = testbed.host(spec.sink.host)
    session = TcpSession(spec.path, src.endpoint, dst.endpoint)
    if pwidth == 1:
        return session_rate_unconstrained(session)
    alloc = water_fill(FlowSet(spec.path, [session] * pwidth))
    return sum(alloc, Fraction(0))


def solo_direct_rate(spec: TransferSpec, testbed: Testbed,
                     disk_streams: dict[str, int] | None = None) -> Fraction:
    """Steady solo rate of one transfer over its direct path."""
    chain = burst_chain_rate(spec, testbed, disk_streams)
    proto = spec.protocol
    if isinstance(proto, MoverPdata):
        return pdata_steady_rate(proto.packet, spec.path.rtt, chain)
    if isinstance(proto, PdataPush):
        return chain
    if isinstance(proto, ClientApi):
        unit = min(proto.buffer, testbed.pdata_packet)
        return pdata_steady_rate(unit, spec.path.rtt, chain)
    if isinstance(proto, Pftp):
        # ftp data channels ride the mover's pdata discipline; pwidth widens
        # only the TCP window budget, shared max-min across the streams.
        pdata = pdata_steady_rate(testbed.pdata_packet, spec.path.rtt, chain)
        return min(pdata, window_rate_sum(spec, testbed, proto.pwidth))
    raise ConfigError(f"unknown protocol {proto!r}")


def _relay_leg_rates(spec: TransferSpec, testbed: Testbed,
                     via: Host) -> tuple[Fraction, Fraction]:
    """Structural network rates of the two legs through the relay host.

    Storage caps are deliberately excluded: whether the relay NIC can carry
    both legs at once is a property of the paths, not of transient disk load.
    """
    src = testbed.host(spec.source.host)
    dst = testbed.host(spec.sink.host)
    leg_in = TcpSession(testbed.mover_lan, src.endpoint, via.endpoint)
    leg_out = TcpSession(spec.path, via.endpoint, dst.endpoint)
    return session_rate_unconstrained(leg_in), session_rate_unconstrained(leg_out)


def relay_rate(direct_rate, leg_in_rate, leg_out_rate, nic_capacity) -> Fraction:
    """End-to-end rate through a store-and-forward relay with one NIC.

    When the NIC cannot carry both legs at full speed at once, inbound and
    outbound strictly alternate and every byte crosses the NIC twice, so the
    achievable direct-path rate is halved. With NIC headroom for both legs
    the relay is transparent.
    """
    direct, r_in, r_out, nic = map(rational, (direct_rate, leg_in_rate, leg_out_rate, nic_capacity))
    through = min(direct, r_in, r_out)
    if nic >= r_in + r_out:
        return through
    return through / 2


def solo_rate(spec: TransferSpec, testbed: Testbed,
              disk_streams: dict[str, int] | None = None) -> Fraction:
    """Solo steady rate of a transfer, honoring its data path."""
    disk_streams = disk_streams or {}
    direct = solo_direct_rate(spec, testbed, disk_streams)
    if isinstance(spec.data_path, Relay) and spec.data_path.via != spec.source.host:
        via = testbed.host(spec.data_path.via)
        r_in, r_out = _relay_leg_rates(spec, testbed, via)
        return relay_rate(direct, r_in, r_out, via.nic_cap)
    return direct


def setup_delay(spec: TransferSpec) -> Fraction:
    """Protocol setup latency before the first byte moves."""
    if isinstance(spec.protocol, PdataPush):
        return spec.path.rtt
    return Fraction(0)


def resource_usage(spec: TransferSpec, testbed: Testbed) -> dict[str, int]:
    """Shared-resource coefficients of one flow (units consumed per byte/s)."""
    use = {
        f"link:{spec.path.name}": 1,
        f"cpu:{spec.source.host}": 1,
        f"cpu:{spec.sink.host}": 1,
        f"nic:{spec.source.host}": 1,
        f"nic:{spec.sink.host}": 1,
    }
    if isinstance(spec.data_path, Relay) and spec.data_path.via != spec.source.host:
        via = spec.data_path.via
        use[f"link:{testbed.mover_lan.name}"] = 1
        use[f"cpu:{via}"] = use.get(f"cpu:{via}", 0) + 1
        # relayed bytes cross the relay NIC inbound and outbound
        use[f"nic:{via}"] = use.get(f"nic:{via}", 0) + 2
    return use


def shared_capacities(testbed: Testbed) -> dict[str, Fraction]:
    caps: dict[str, Fraction] = {}
    for p in (testbed.wan, testbed.lan, testbed.mover_lan):
        caps[f"link:{p.name}"] = p.capacity
    for h in [*testbed.movers, testbed.client, testbed.core]:
        caps[f"cpu:{h.name}"] = h.endpoint.cpu_cap
        caps[f"nic:{h.name}"] = h.nic_cap
    return caps


# --------------------------------------------------------------------------
# fluid concurrent execution


@dataclass
class FlowRecord:
    spec: TransferSpec
    remaining: Fraction
    rate: Fraction = Fraction(0)
    last_update: Fraction = Fraction(0)
    epoch: int = 0
    started_at: Fraction | None = None
    finished_at: Fraction | None = None

    @property
    def delivered(self) -> Fraction:
        return self.spec.size - self.remaining


class TransferRun:
    """Run a set of TransferSpecs to completion under fluid max-min sharing.

    Demands (solo rates) and disk contention are recomputed at every flow
    arrival and departure; between events every flow progresses linearly at
    its allocated rate, tracked in exact arithmetic so completions land
    precisely when the last byte does.
    """

    def __init__(self, testbed: Testbed, specs: list[TransferSpec], name: str = "xfer"):
        if not specs:
            raise ConfigError("transfer run needs at least one spec")
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ConfigError("transfer names must be unique")
        self.testbed = testbed
        self.specs = list(specs)
        self.name = name
        self.engine = Engine()
        self.engine.register(name, self._handle)
        self._running: dict[str, FlowRecord] = {}
        self.flows: dict[str, FlowRecord] = {}
        self.capacities = shared_capacities(testbed)

    # -- lifecycle -------------------------------------------------------

    def run(self) -> dict[str, FlowRecord]:
        for spec in self.specs:
            self.engine.schedule(spec.start_at + setup_delay(spec), self.name,
                                 ("arrive", spec.name))
            self.flows[spec.name] = FlowRecord(spec, spec.size)
        self.engine.run_until_idle()
        unfinished = [n for n, f in self.flows.items() if f.finished_at is None]
        if unfinished:
            raise InternalError(f"flows never completed: {unfinished}")
        return self.flows

    @property
    def makespan(self) -> Fraction:
        return max(f.finished_at for f in self.flows.values())

    def aggregate_rate(self) -> Fraction:
        """Total bytes over the span from first start to last completion."""
        total = sum((f.spec.size for f in self.flows.values()), Fraction(0))
        return total / self.makespan

    # -- event handling ----------------------------------------------------

    def _handle(self, engine: Engine, event) -> None:
        kind = event.payload[0]
        if kind == "arrive":
            flow = self.flows[event.payload[1]]
            flow.started_at = engine.now
            flow.last_update = engine.now
            self._running[flow.spec.name] = flow
            self._reallocate()
        elif kind == "finish":
            _, flow_name, epoch = event.payload
            flow = self.flows[flow_name]
            if flow.epoch != epoch or flow.finished_at is not None:
                return  # superseded by a later reallocation
            self._settle(flow)
            if flow.remaining != 0:
                raise InternalError(
                    f"flow {flow_name!r} finished with {flow.remaining} bytes left")
            flow.finished_at = engine.now
            del self._running[flow_name]
            self._reallocate()

    def _settle(self, flow: FlowRecord) -> None:
        elapsed = self.engine.now - flow.last_update
        flow.remaining -= flow.rate * elapsed
        flow.last_update = self.engine.now
        if flow.remaining < 0:
            raise InternalError(f"flow {flow.spec.name!r} overdelivered")

    def _disk_streams(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for flow in self._running.values():
            for ref in (flow.spec.source, flow.spec.sink):
                if ref.kind == "disk":
                    counts[ref.disk.name] = counts.get(ref.disk.name, 0) + 1
        return counts

    def _reallocate(self) -> None:
        flows = list(self._running.values())
        if not flows:
            return
        disk_streams = self._disk_streams()
        demands = [solo_rate(f.spec, self.testbed, disk_streams) for f in flows]
        usage = [resource_usage(f.spec, self.testbed) for f in flows]
        rates = max_min_allocation(demands, usage, self.capacities)
        for flow, rate in zip(flows, rates):
            self._settle(flow)
            if rate <= 0:
                raise InternalError(f"flow {flow.spec.name!r} allocated zero rate")
            flow.rate = rate
            flow.epoch += 1
            self.engine.schedule(flow.remaining / rate, self.name,
                                 ("finish", flow.spec.name, flow.epoch))


# --------------------------------------------------------------------------
# session-level operations


def run_pftp_session(testbed: Testbed, spec: TransferSpec,
                     concurrent_files: int) -> list[tuple[str, Fraction]]:
    """Read N files concurrently, round-robin across mover disks.

    Returns (file name, completion seconds) per file; spec supplies size,
    protocol, path and sink, while sources rotate over every mover disk.
    """
    if concurrent_files < 1:
        raise ConfigError("concurrent_files must be >= 1")
    disks = [(h.name, d) for h in testbed.movers for d in h.disks]
    # interleave movers first so two files land on two hosts before two disks
    disks.sort(key=lambda hd: (hd[1].name.split(".")[-1], hd[0]))
    specs = []
    for i in range(concurrent_files):
        host, dsk = disks[i % len(disks)]
        source = StorageRef("disk", host, dsk)
        specs.append(replace(spec, name=f"{spec.name}.{i}", source=source))
    run = TransferRun(testbed, specs)
    flows = run.run()
    return [(name, flows[name].finished_at) for name in sorted(flows)]


def run_relay_transfer(testbed: Testbed, spec: TransferSpec) -> Fraction:
    """Completion time of one transfer whose data path is a relay."""
    if isinstance(spec.data_path, Relay) and spec.data_path.via == spec.source.host:
        spec = replace(spec, data_path=Direct())  # no second hop
    run = TransferRun(testbed, [spec])
    return run.run()[spec.name].finished_at


def client_api_sweep(testbed: Testbed, buffers: list[Fraction],
                     direction: str, path: NetPath) -> list[tuple[Fraction, Fraction]]:
    """Transfer rate per API buffer size; direction is 'read' or 'write'.

    Reads pull mover disk → client memory; writes push client memory → mover
    disk. Returns (buffer, bytes/s) pairs.
    """
    if direction not in ("read", "write"):
        raise ConfigError(f"bad direction {direction!r}")
    if not buffers:
        raise ConfigError("buffer sweep must be non-empty")
    mover = testbed.movers[0]
    mover_end = StorageRef("disk", mover.name, mover.disks[0])
    client_end = StorageRef("memory", testbed.client.name)
    src, dst = (mover_end, client_end) if direction == "read" else (client_end, mover_end)
    out = []
    for buf in buffers:
        spec = TransferSpec(f"api_{direction}", testbed.file_size, src, dst,
                            ClientApi(rational(buf)), path)
        run = TransferRun(testbed, [spec])
        flow = run.run()[spec.name]
        out.append((rational(buf), spec.size / flow.finished_at))
    return out
