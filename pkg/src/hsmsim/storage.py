"""Storage model: striped-disk contention and a robotic tape library.

Disks lose sequential efficiency when several streams share one spindle set.
Tape reads pay a robot exchange before any bytes move: mounts need a free
drive and a free accessor arm, and cartridges already sitting in drives may
have to be evicted first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import ConfigError, Engine, rational


@dataclass
class Disk:
    """A disk (or RAID set) with a sequential rate and a contention knob."""

    name: str
    seq_rate: Fraction            # bytes/second for one sequential stream
    contention_alpha: Fraction = Fraction(1, 5)

    def __post_init__(self):
        if self.seq_rate <= 0:
            raise ConfigError(f"disk {self.name!r}: seq_rate must be positive")
        if self.contention_alpha < 0:
            raise ConfigError(f"disk {self.name!r}: contention_alpha must be >= 0")


def disk_aggregate_rate(d: Disk, n_streams: int) -> Fraction:
    """Total rate with n concurrent streams: seq_rate / (1 + alpha*(n-1)).

    Head movement between streams makes aggregate throughput fall below the
    sequential rate as concurrency grows.
    """
    if n_streams <= 0:
        raise ConfigError("n_streams must be >= 1")
    return d.seq_rate / (1 + d.contention_alpha * (n_streams - 1))


def disk_stream_rate(d: Disk, n_streams: int) -> Fraction:
    """Per-stream share of the contended aggregate."""
    return disk_aggregate_rate(d, n_streams) / n_streams


def disk(name: str, seq_rate, contention_alpha=0.2) -> Disk:
    return Disk(name, rational(seq_rate), rational(contention_alpha))


@dataclass
class MoverHost:
    """A data-mover host: its disks plus NIC/CPU identity used by the network model."""

    name: str
    disks: list[Disk] = field(default_factory=list)


@dataclass
class Cartridge:
    name: str
    files: dict[str, Fraction] = field(default_factory=dict)  # file id -> bytes


@dataclass
class TapeDrive:
    name: str
    read_rate: Fraction
    mounted: str | None = None    # cartridge name, once a mount completes


@dataclass
class TapeLibrary:
    """Static description of the robot: drives, accessor arms, exchange cost."""

    drives: list[TapeDrive]
    cartridges: dict[str, Cartridge]
    accessors: int = 2
    exchange_time: Fraction = Fraction(90)

    def __post_init__(self):
        if self.accessors < 1:
            raise ConfigError("library needs at least one accessor")
        if self.exchange_time < 0:
            raise ConfigError("exchange_time must be >= 0")
        owner: dict[str, str] = {}
        for c in self.cartridges.values():
            for f in c.files:
                if f in owner:
                    raise ConfigError(f"file {f!r} on two cartridges")
                owner[f] = c.name
        self._file_owner = owner

    def cartridge_of(self, file_id: str) -> Cartridge:
        try:
            return self.cartridges[self._file_owner[file_id]]
        except KeyError:
            raise ConfigError(f"file {file_id!r} not on any cartridge") from None


@dataclass
class _MountJob:
    cartridge: str
    submitted: Fraction


@dataclass
class _TransferJob:
    file_id: str
    size: Fraction
    submitted: Fraction


class TapeLibrarySim:
    """Event-driven scheduler for one TapeLibrary on one Engine.

    Mount requests queue FIFO behind the accessor pool. A mount claims a free
    drive, or evicts the least recently used idle drive at the cost of one
    extra exchange. Each drive serves its transfer queue one file at a time
    at the drive's rate; reads never interleave.
    """

    def __init__(self, engine: Engine, library: TapeLibrary, name: str = "tape"):
        self.engine = engine
        self.lib = library
        self.name = name
        self._mount_queue: deque[_MountJob] = deque()
        self._mounting: dict[str, TapeDrive] = {}   # cartridge -> claimed drive
        self._drive_queues: dict[str, deque[_TransferJob]] = {d.name: deque() for d in library.drives}
        self._drive_busy: dict[str, bool] = {d.name: False for d in library.drives}
        self._drive_last_use: dict[str, Fraction] = {d.name: Fraction(-1) for d in library.drives}
        self._free_accessors = library.accessors
        self._pending: dict[str, list[_TransferJob]] = {}  # cartridge -> jobs awaiting mount
        self.completions: list[tuple[str, Fraction, Fraction]] = []  # (file, submitted, done)
        engine.register(name, self._handle)

    # -- public ----------------------------------------------------------

    def request_read(self, file_id: str) -> None:
        """Ask for file_id now; completion lands in self.completions."""
        cart = self.lib.cartridge_of(file_id)
        job = _TransferJob(file_id, cart.files[file_id], self.engine.now)
        drive = self._drive_with(cart.name)
        if drive is not None:
            self._enqueue_transfer(drive, job)
        elif cart.name in self._mounting or cart.name in self._pending:
            self._pending.setdefault(cart.name, []).append(job)
        else:
            self._pending[cart.name] = [job]
            self._mount_queue.append(_MountJob(cart.name, self.engine.now))
            self._dispatch_mounts()

    # -- internals ---------------------------------------------------------

    def _drive_with(self, cartridge: str) -> TapeDrive | None:
        for d in self.lib.drives:
            if d.mounted == cartridge and cartridge not in self._mounting:
                return d
        return None

    def _claim_drive(self) -> tuple[TapeDrive, bool] | None:
        """A drive for a new mount: empty first, else LRU idle; None if all busy."""
        claimed = {d.name for d in self._mounting.values()}
        for d in self.lib.drives:
            if d.mounted is None and d.name not in claimed:
                return d, False
        idle = [d for d in self.lib.drives
                if d.name not in claimed
                and not self._drive_busy[d.name]
                and not self._drive_queues[d.name]]
        if not idle:
            return None
        lru = min(idle, key=lambda d: (self._drive_last_use[d.name], d.name))
        return lru, True

    def _dispatch_mounts(self) -> None:
        while self._mount_queue and self._free_accessors > 0:
            claim = self._claim_drive()
            if claim is None:
                return
            drive, evict = claim
            job = self._mount_queue.popleft()
            self._free_accessors -= 1
            if evict:
                drive.mounted = None  # old cartridge goes back to its slot
            self._mounting[job.cartridge] = drive
            cost = self.lib.exchange_time * (2 if evict else 1)
            self.engine.schedule(cost, self.name, ("mounted", job.cartridge))

    def _enqueue_transfer(self, drive: TapeDrive, job: _TransferJob) -> None:
        self._drive_queues[drive.name].append(job)
        self._start_next(drive)

    def _start_next(self, drive: TapeDrive) -> None:
        if self._drive_busy[drive.name] or not self._drive_queues[drive.name]:
            return
        job = self._drive_queues[drive.name].popleft()
        self._drive_busy[drive.name] = True
        self.engine.schedule(job.size / drive.read_rate, self.name,
                             ("done", drive.name, job))

    def _handle(self, engine: Engine, event) -> None:
        kind = event.payload[0]
        if kind == "mounted":
            cartridge = event.payload[1]
            drive = self._mounting.pop(cartridge)
            drive.mounted = cartridge
            self._free_accessors += 1
            self._drive_last_use[drive.name] = engine.now
            for job in self._pending.pop(cartridge, []):
                self._drive_queues[drive.name].append(job)
            self._start_next(drive)
            self._dispatch_mounts()
        elif kind == "done":
            _, drive_name, job = event.payload
            self._drive_busy[drive_name] = False
            self._drive_last_use[drive_name] = engine.now
            self.completions.append((job.file_id, job.submitted, engine.now))
            drive = next(d for d in self.lib.drives if d.name == drive_name)
            self._start_next(drive)
            self._dispatch_mounts()


def aggregate_tape_throughput(library: TapeLibrary, n_premounted: int) -> Fraction:
    """Aggregate read rate with n cartridges already in drives (no robot work)."""
    if n_premounted < 0 or n_premounted > len(library.drives):
        raise ConfigError("n_premounted out of range")
    return sum((d.read_rate for d in library.drives[:n_premounted]), Fraction(0))
