"""Scenario configs: flat INI sections, strict validation, canned library.

A scenario names a kind (which experiment shape to run), a sweep variable
with its values, and optional overrides for topology, protocol, transfer and
deployment parameters. Unknown sections or keys are rejected with the full
key path so typos fail loudly instead of silently running defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .engine import ConfigError
from .testbed import DEFAULTS, Testbed, build_testbed

KINDS = (
    "netperf",
    "stream_scaling",
    "client_api",
    "pftp_concurrency",
    "tape_read",
    "write_contention",
    "relay_compare",
    "stagein",
)

_ALLOWED_KEYS = {
    "scenario": {"id", "kind", "sweep", "values", "repetitions"},
    "topology": set(DEFAULTS),
    "protocol": {"kind", "packet_B", "pwidth", "api_buffer_B", "windows_B", "pipelined"},
    "transfer": {"size_B", "source", "sink"},
    "deployment": {"pftpd", "pftpd_host", "data_host"},
    "job": {"xrsl", "file_locations"},
}


@dataclass
class Scenario:
    id: str
    kind: str
    sweep_name: str
    sweep_values: list[str]
    repetitions: int = 1
    topology: dict[str, str] = field(default_factory=dict)
    protocol: dict[str, str] = field(default_factory=dict)
    transfer: dict[str, str] = field(default_factory=dict)
    deployment: dict[str, str] = field(default_factory=dict)
    job: dict[str, str] = field(default_factory=dict)
    base_dir: Path = Path(".")

    def build_testbed(self) -> Testbed:
        return build_testbed({k: v for k, v in self.topology.items()})

    def override(self, dotted_key: str, value: str) -> None:
        """Apply a --set section.key=value override."""
        section, _, key = dotted_key.partition(".")
        if not key:
            raise ConfigError(f"override {dotted_key!r}: want section.key")
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"override names unknown section {section!r}")
        if key not in _ALLOWED_KEYS[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        if section == "scenario":
            if key == "sweep":
                self.sweep_name = value
            elif key == "values":
                self.sweep_values = value.split()
            elif key == "repetitions":
                self.repetitions = _positive_int(value, "scenario.repetitions")
            elif key == "id":
                self.id = value
            else:
                raise ConfigError(f"scenario.{key} cannot be overridden")
        else:
            getattr(self, section)[key] = value


def _positive_int(text: str, where: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"{where}: not an integer: {text!r}") from None
    if n < 1:
        raise ConfigError(f"{where}: must be >= 1")
    return n


def _validate(sc: Scenario) -> Scenario:
    if not sc.id:
        raise ConfigError("scenario.id is required")
    if sc.kind not in KINDS:
        raise ConfigError(f"scenario.kind {sc.kind!r} not one of {KINDS}")
    if not sc.sweep_values:
        raise ConfigError("scenario.values must be non-empty")
    return sc


def parse_scenario_text(text: str, base_dir: Path = Path("."), origin: str = "<string>") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), strict=True)
    cp.optionxform = str  # keys are case-sensitive (URL paths, host names)
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None

    for section in cp.sections():
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"{origin}: unknown section [{section}]")
        for key in cp[section]:
            if key not in _ALLOWED_KEYS[section]:
                raise ConfigError(f"{origin}: unknown key {section}.{key}")

    if "scenario" not in cp:
        raise ConfigError(f"{origin}: missing [scenario] section")
    head = cp["scenario"]
    sc = Scenario(
        id=head.get("id", ""),
        kind=head.get("kind", ""),
        sweep_name=head.get("sweep", "value"),
        sweep_values=head.get("values", "").split(),
        repetitions=_positive_int(head.get("repetitions", "1"), "scenario.repetitions"),
        topology=dict(cp["topology"]) if "topology" in cp else {},
        protocol=dict(cp["protocol"]) if "protocol" in cp else {},
        transfer=dict(cp["transfer"]) if "transfer" in cp else {},
        deployment=dict(cp["deployment"]) if "deployment" in cp else {},
        job=dict(cp["job"]) if "job" in cp else {},
        base_dir=base_dir,
    )
    return _validate(sc)


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {p}: {exc}") from None
    return parse_scenario_text(text, base_dir=p.parent, origin=str(p))


# --------------------------------------------------------------------------
# canned scenarios (shipped as package data)

CANNED = (
    "fig3_netperf",
    "fig4_streams",
    "fig5_client_api",
    "fig6_pftp_read",
    "fig7_tape",
    "fig8_write",
    "fig9_relay",
    "xrsl_stagein",
)


def _data_root():
    return resources.files("hsmsim") / "scenarios"


def load_canned(name: str) -> Scenario:
    if name not in CANNED:
        raise ConfigError(f"unknown canned scenario {name!r}; have {', '.join(CANNED)}")
    ref = _data_root() / f"{name}.ini"
    text = ref.read_text()
    with resources.as_file(_data_root()) as root:
        return parse_scenario_text(text, base_dir=Path(root), origin=f"canned:{name}")


def load_suite(names: list[str] | None = None) -> list[Scenario]:
    scenarios = [load_canned(n) for n in (names or CANNED)]
    seen: set[str] = set()
    for sc in scenarios:
        if sc.id in seen:
            raise ConfigError(f"duplicate scenario id {sc.id!r} in suite")
        seen.add(sc.id)
    return scenarios


def read_job_text(sc: Scenario, filename: str) -> str:
    """Resolve a job file referenced by a scenario, relative to its config."""
    p = Path(filename)
    if not p.is_absolute():
        p = sc.base_dir / p
    try:
        return p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read job file {p}: {exc}") from None


def parse_mapping(text: str, where: str) -> dict[str, str]:
    """Parse 'key=value key=value' pairs (used by file_locations, windows_B)."""
    out: dict[str, str] = {}
    for item in text.split():
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise ConfigError(f"{where}: expected key=value, got {item!r}")
        if key in out:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        out[key] = value
    return out
