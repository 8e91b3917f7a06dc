"""Parser for the XRSL job-description subset used for gsiftp stage-in.

Supported grammar (everything the sample jobs use, nothing more):

    document  := '&' group*
    group     := '(' key '=' value ')'
    value     := scalar | tuple+
    tuple     := '(' string* ')'
    scalar    := one string
    string    := bare-token | "..." | ''...''

Both double quotes and doubled single quotes delimit strings. A stray '%'
between groups is tolerated with a warning (it shows up in job descriptions
cut-and-pasted from typeset documents). Full XRSL (disjunctions, relational
operators) is out of scope and rejected with a position-carrying ParseError.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ConfigError


class ParseError(ValueError):
    """Syntax failure with 1-based line/col and what was expected there."""

    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class ValidationError(ValueError):
    """Structurally valid XRSL that violates a semantic rule (e.g. tuple arity)."""


@dataclass
class XrslDocument:
    attributes: list[tuple[str, str | list[tuple[str, ...]]]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def get(self, key: str):
        for k, v in self.attributes:
            if k == key:
                return v
        return None


_BARE_STOP = set(' \t\r\n()"\'&%=')


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _position(self) -> tuple[int, int]:
        line = self.text.count("\n", 0, self.pos) + 1
        last_nl = self.text.rfind("\n", 0, self.pos)
        return line, self.pos - last_nl

    def fail(self, expected: str):
        line, col = self._position()
        raise ParseError(line, col, expected)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"'{ch}'")
        self.pos += 1


def _parse_string(s: _Scanner) -> str:
    """One string token: double-quoted, double-single-quoted, or bare."""
    c = s.peek()
    if c == '"':
        s.pos += 1
        end = s.text.find('"', s.pos)
        if end < 0:
            s.fail("closing '\"'")
        value = s.text[s.pos:end]
        s.pos = end + 1
        return value
    if c == "'":
        if s.text[s.pos:s.pos + 2] != "''":
            s.fail("\"''\" quote")
        s.pos += 2
        end = s.text.find("''", s.pos)
        if end < 0:
            s.fail("closing \"''\"")
        value = s.text[s.pos:end]
        s.pos = end + 2
        return value
    start = s.pos
    while not s.eof() and s.text[s.pos] not in _BARE_STOP:
        s.pos += 1
    if s.pos == start:
        s.fail("string")
    return s.text[start:s.pos]


def _parse_value(s: _Scanner):
    s.skip_ws()
    if s.peek() != "(":
        return _parse_string(s)
    tuples: list[tuple[str, ...]] = []
    while True:
        s.skip_ws()
        if s.peek() != "(":
            break
        s.pos += 1
        elements: list[str] = []
        while True:
            s.skip_ws()
            if s.peek() == ")":
                s.pos += 1
                break
            if s.eof() or s.peek() == "(":
                s.fail("string element or ')'")
            elements.append(_parse_string(s))
        tuples.append(tuple(elements))
    return tuples


def _parse_key(s: _Scanner) -> str:
    start = s.pos
    while not s.eof() and s.text[s.pos] not in _BARE_STOP:
        s.pos += 1
    if s.pos == start:
        s.fail("attribute key")
    return s.text[start:s.pos]


def parse_xrsl(text: str) -> XrslDocument:
    """Parse a job description; raises ParseError on any syntax problem."""
    s = _Scanner(text)
    doc = XrslDocument()
    s.skip_ws()
    if s.peek() != "&":
        s.fail("'&'")
    s.pos += 1
    while True:
        s.skip_ws()
        while s.peek() == "%":
            line, col = s._position()
            doc.warnings.append(f"line {line}, col {col}: stray '%' ignored")
            s.pos += 1
            s.skip_ws()
        if s.eof():
            break
        s.expect("(")
        s.skip_ws()
        key = _parse_key(s)
        s.skip_ws()
        s.expect("=")
        value = _parse_value(s)
        s.skip_ws()
        s.expect(")")
        doc.attributes.append((key, value))
    return doc


def render(doc: XrslDocument) -> str:
    """Serialize a document; render(parse(x)) reparses to an equal document."""
    parts = ["&"]
    for key, value in doc.attributes:
        if isinstance(value, list):
            body = "".join("(" + " ".join(f'"{e}"' for e in t) + ")" for t in value)
        else:
            body = f'"{value}"'
        parts.append(f"({key}={body})")
    return "\n".join(parts) + "\n"


# --------------------------------------------------------------------------
# stage-in extraction


@dataclass(frozen=True)
class StageInUrl:
    scheme: str
    host: str
    port: int
    path: str


@dataclass(frozen=True)
class StageInRequest:
    name: str
    url: StageInUrl


GSIFTP_DEFAULT_PORT = 2811


def parse_url(text: str) -> StageInUrl:
    scheme, sep, rest = text.partition("://")
    if not sep or not scheme:
        raise ValidationError(f"not a URL: {text!r}")
    authority, _, path = rest.partition("/")
    host, colon, port_text = authority.partition(":")
    if not host:
        raise ValidationError(f"URL missing host: {text!r}")
    if colon:
        if not port_text.isdigit() or int(port_text) <= 0:
            raise ValidationError(f"bad port in URL: {text!r}")
        port = int(port_text)
    else:
        port = GSIFTP_DEFAULT_PORT
    return StageInUrl(scheme, host, port, "/" + path)


def extract_stage_ins(doc: XrslDocument) -> tuple[list[StageInRequest], list[str]]:
    """Stage-in requests from inputfiles, plus diagnostics for unroutable ones.

    Only gsiftp URLs are routable here; other schemes are reported, not fatal.
    """
    value = doc.get("inputfiles")
    if value is None:
        return [], []
    if not isinstance(value, list):
        raise ValidationError("inputfiles must be a list of (name url) tuples")
    requests: list[StageInRequest] = []
    diagnostics: list[str] = []
    for t in value:
        if len(t) != 2:
            raise ValidationError(f"inputfiles tuple must have 2 elements, got {len(t)}: {t!r}")
        name, url_text = t
        try:
            url = parse_url(url_text)
        except ValidationError as exc:
            diagnostics.append(f"{name}: {exc}")
            continue
        if url.scheme != "gsiftp":
            diagnostics.append(f"{name}: unsupported scheme {url.scheme!r}")
            continue
        requests.append(StageInRequest(name, url))
    return requests, diagnostics


def stage_in_to_transfers(requests, testbed, deployment: str, pftpd_host: str,
                          file_locations: dict[str, str] | None = None):
    """Turn stage-in requests into read transfers to the compute host's disk.

    file_locations maps URL paths to the mover actually holding the data;
    unmapped files are assumed co-resident with the daemon.
    """
    from .dialect import select_data_path
    from .protocols import Pftp, StorageRef, TransferSpec

    file_locations = file_locations or {}
    testbed.host(pftpd_host)  # unknown host -> ConfigError
    for host in file_locations.values():
        testbed.host(host)
    specs = []
    client = testbed.client
    for i, req in enumerate(requests):
        data_host_name = file_locations.get(req.url.path, pftpd_host)
        data_host = testbed.host(data_host_name)
        if not data_host.disks:
            raise ConfigError(f"host {data_host_name!r} has no disks to serve {req.name!r}")
        source = StorageRef("disk", data_host_name, data_host.disks[i % len(data_host.disks)])
        sink = StorageRef("disk", client.name, client.disks[0])
        data_path = select_data_path(deployment, pftpd_host, data_host_name)
        specs.append(TransferSpec(
            name=f"stagein.{i}.{req.name}",
            size=testbed.file_size,
            source=source,
            sink=sink,
            protocol=Pftp(1),
            path=testbed.wan,
            data_path=data_path,
        ))
    return specs
