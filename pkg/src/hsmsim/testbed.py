"""Testbed description: hosts, paths, and storage geometry with measured defaults.

The default numbers describe a two-site layout: a storage cluster (two disk
movers, a control host, a tape robot) reached either over the local GbE LAN
or over a ~60 km GbE WAN, and a client host with a single local disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .engine import ConfigError, rational
from .network import Endpoint, NetPath, endpoint, path
from .storage import Cartridge, Disk, TapeDrive, TapeLibrary, disk


@dataclass
class Host:
    """A host with its NIC identity and any locally attached disks."""

    name: str
    endpoint: Endpoint
    disks: list[Disk] = field(default_factory=list)
    nic_cap: Fraction = Fraction(125_000_000)


@dataclass
class TapeGeometry:
    """Robot shape; actual TapeLibrary instances are built fresh per run."""

    drives: int = 4
    drive_rate: Fraction = Fraction(14_000_000)
    accessors: int = 2
    exchange_time: Fraction = Fraction(90)

    def build(self, cartridges: dict[str, Cartridge]) -> TapeLibrary:
        drives = [TapeDrive(f"drive{i}", self.drive_rate) for i in range(self.drives)]
        return TapeLibrary(drives, cartridges, self.accessors, self.exchange_time)


@dataclass
class Testbed:
    movers: list[Host]
    client: Host
    core: Host                       # control host: runs the classic ftp daemon, holds no data
    wan: NetPath
    lan: NetPath
    mover_lan: NetPath               # path between storage-cluster hosts
    tape: TapeGeometry
    pdata_packet: Fraction = Fraction(262_144)
    file_size: Fraction = Fraction(2_000_000_000)

    def host(self, name: str) -> Host:
        for h in [*self.movers, self.client, self.core]:
            if h.name == name:
                return h
        raise ConfigError(f"unknown host {name!r}")

    def path_named(self, name: str) -> NetPath:
        for p in (self.wan, self.lan, self.mover_lan):
            if p.name == name:
                return p
        raise ConfigError(f"unknown path {name!r}")

    def all_disks(self) -> list[tuple[str, Disk]]:
        out = []
        for h in [*self.movers, self.client]:
            out.extend((h.name, d) for d in h.disks)
        return out


DEFAULTS = {
    "wan_rtt_s": 3.5e-3,
    "lan_rtt_s": 2.0e-4,
    "link_capacity_Bps": 125e6,
    "wan_loss_rate": 0.0,
    "wan_loss_penalty": 0.0,
    "movers": 2,
    "disks_per_mover": 2,
    "mover_disk_rate_Bps": 80e6,
    "mover_disk_alpha": 0.2,
    "mover_cpu_cap_Bps": 90e6,
    "mover_tcp_buffer_B": 262144,
    "client_tcp_buffer_B": 64e6,
    "client_cpu_cap_Bps": 125e6,
    "client_disk_rate_Bps": 40e6,
    "client_disk_alpha": 0.2,
    "client_disks": 1,
    "tape_drives": 4,
    "tape_drive_rate_Bps": 14e6,
    "tape_accessors": 2,
    "tape_exchange_s": 90,
    "pdata_packet_B": 262144,
    "file_size_B": 2e9,
}


def build_testbed(overrides: dict[str, object] | None = None) -> Testbed:
    """Assemble a Testbed from DEFAULTS plus overrides (unknown keys rejected)."""
    cfg = dict(DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in cfg:
            raise ConfigError(f"unknown topology key {key!r}")
        cfg[key] = value

    def frac(key: str) -> Fraction:
        return rational(cfg[key])  # type: ignore[arg-type]

    def count(key: str) -> int:
        n = int(cfg[key])  # type: ignore[arg-type]
        if n < 1:
            raise ConfigError(f"topology key {key!r} must be >= 1")
        return n

    cap = frac("link_capacity_Bps")
    wan = path("wan", frac("wan_rtt_s"), cap, frac("wan_loss_rate"), frac("wan_loss_penalty"))
    lan = path("lan", frac("lan_rtt_s"), cap)
    mover_lan = path("mover_lan", frac("lan_rtt_s"), cap)

    movers = []
    for i in range(count("movers")):
        name = f"mover{i}"
        disks = [disk(f"{name}.d{j}", frac("mover_disk_rate_Bps"), frac("mover_disk_alpha"))
                 for j in range(count("disks_per_mover"))]
        movers.append(Host(name, endpoint(name, frac("mover_tcp_buffer_B"), frac("mover_cpu_cap_Bps")),
                           disks, cap))

    client = Host("client",
                  endpoint("client", frac("client_tcp_buffer_B"), frac("client_cpu_cap_Bps")),
                  [disk(f"client.d{j}", frac("client_disk_rate_Bps"), frac("client_disk_alpha"))
                   for j in range(count("client_disks"))],
                  cap)
    core = Host("core", endpoint("core", frac("mover_tcp_buffer_B"), frac("mover_cpu_cap_Bps")), [], cap)

    tape = TapeGeometry(count("tape_drives"), frac("tape_drive_rate_Bps"),
                        count("tape_accessors"), frac("tape_exchange_s"))

    return Testbed(movers, client, core, wan, lan, mover_lan, tape,
                   frac("pdata_packet_B"), frac("file_size_B"))
