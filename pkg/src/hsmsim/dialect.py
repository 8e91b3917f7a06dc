"""FTP dialect negotiation between GridFTP-style and GSI-pftp-style speakers.

Both dialects extend the same RFC959 base with certificate auth (AUTH/ADAT);
their extra verbs differ. A session agrees on the feature intersection, and
fails only when one side *requires* a verb the other never offers. Data-path
selection captures the deployment difference: the classic daemon brokers a
direct mover-to-client connection, while a GSI daemon sits in the data path
and relays whenever it isn't co-resident with the data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .engine import ConfigError
from .protocols import DataPath, Direct, Relay


class DialectFeature(enum.Enum):
    # GridFTP-unique verbs
    SPAS = "SPAS"
    SPOR = "SPOR"
    ETET = "ETET"
    ESTO = "ESTO"
    SBUF = "SBUF"
    DCAU = "DCAU"
    # GSI-pftp-unique verbs
    PBSZ = "PBSZ"
    PCLO = "PCLO"
    PORPN = "PORPN"
    PPOR = "PPOR"
    PROT = "PROT"
    PRTR = "PRTR"
    PSTO = "PSTO"
    # common to every secured dialect
    AUTH = "AUTH"
    ADAT = "ADAT"
    RFC959_BASE = "RFC959_BASE"


GRIDFTP_UNIQUE = frozenset({
    DialectFeature.SPAS, DialectFeature.SPOR, DialectFeature.ETET,
    DialectFeature.ESTO, DialectFeature.SBUF, DialectFeature.DCAU,
})
GSIPFTP_UNIQUE = frozenset({
    DialectFeature.PBSZ, DialectFeature.PCLO, DialectFeature.PORPN,
    DialectFeature.PPOR, DialectFeature.PROT, DialectFeature.PRTR,
    DialectFeature.PSTO,
})
COMMON = frozenset({
    DialectFeature.AUTH, DialectFeature.ADAT, DialectFeature.RFC959_BASE,
})

# every feature belongs to exactly one group; extending the enum without
# classifying the new member must fail loudly
assert GRIDFTP_UNIQUE | GSIPFTP_UNIQUE | COMMON == frozenset(DialectFeature), \
    "unclassified DialectFeature members"
assert not (GRIDFTP_UNIQUE & GSIPFTP_UNIQUE or GRIDFTP_UNIQUE & COMMON
            or GSIPFTP_UNIQUE & COMMON), "feature classified twice"

# parallel transfer needs a matched passive/active verb pair on both sides
_PARALLEL_PAIRS = (
    frozenset({DialectFeature.SPAS, DialectFeature.SPOR}),
    frozenset({DialectFeature.PPOR, DialectFeature.PORPN}),
)


def dialect_offer(dialect: str) -> frozenset[DialectFeature]:
    """Full feature set a speaker of the given dialect puts on the table."""
    if dialect == "gridftp":
        return GRIDFTP_UNIQUE | COMMON
    if dialect == "gsipftp":
        return GSIPFTP_UNIQUE | COMMON
    if dialect == "plain":
        return frozenset({DialectFeature.RFC959_BASE})
    raise ConfigError(f"unknown dialect {dialect!r}")


@dataclass(frozen=True)
class SpeakerProfile:
    role: str                                  # "client" | "server"
    dialect: str                               # "gridftp" | "gsipftp" | "plain"
    required: frozenset[DialectFeature] = frozenset()
    realm: str = "testbed"

    def __post_init__(self):
        if self.role not in ("client", "server"):
            raise ConfigError(f"bad role {self.role!r}")
        offered = dialect_offer(self.dialect)
        if not self.required <= offered:
            missing = sorted(f.value for f in self.required - offered)
            raise ConfigError(f"{self.dialect} speaker cannot require {missing}")

    @property
    def offered(self) -> frozenset[DialectFeature]:
        return dialect_offer(self.dialect)


@dataclass(frozen=True)
class SessionAgreement:
    agreed: frozenset[DialectFeature]
    parallelism: bool
    data_path: DataPath = Direct()


class RequiredFeatureUnsupported(Exception):
    """A speaker insists on a verb its peer does not offer."""

    def __init__(self, feature: DialectFeature):
        self.feature = feature
        super().__init__(f"required feature {feature.value} not supported by peer")


def negotiate(client: SpeakerProfile, server: SpeakerProfile) -> SessionAgreement:
    """Agree on the verb intersection; fail on an unsatisfiable requirement.

    The check is symmetric — either side's requirement outside the
    intersection kills the session — so swapping roles cannot change the
    outcome.
    """
    agreed = client.offered & server.offered
    for profile in (client, server):
        for feature in sorted(profile.required, key=lambda f: f.value):
            if feature not in agreed:
                raise RequiredFeatureUnsupported(feature)
    parallel = any(pair <= agreed for pair in _PARALLEL_PAIRS)
    return SessionAgreement(frozenset(agreed), parallel)


def auth_handshake(agreement: SessionAgreement, client_realm: str, server_realm: str) -> str:
    """Abstract credential exchange: matching realm strings authenticate.

    No cryptography — the interop question is command compatibility, not
    certificate validity.
    """
    needed = {DialectFeature.AUTH, DialectFeature.ADAT}
    if not needed <= agreement.agreed:
        raise ConfigError("agreement lacks AUTH/ADAT; cannot authenticate")
    return "authenticated" if client_realm == server_realm else "rejected"


def select_data_path(deployment: str, pftpd_host: str, data_host: str) -> DataPath:
    """Where the payload flows for a given daemon deployment.

    The classic (kerberos) daemon lives on the control host and brokers a
    direct mover-to-client data connection. A GSI daemon terminates the data
    channel itself: co-resident with the data it is transparent, otherwise
    every byte detours through it.
    """
    if deployment == "kerberos":
        return Direct()
    if deployment == "gsi":
        if pftpd_host == data_host:
            return Direct()
        return Relay(via=pftpd_host)
    raise ConfigError(f"unknown deployment {deployment!r}")


def effective_buffers(agreement: SessionAgreement, default_buffer, requested):
    """TCP buffer a session actually runs with: SBUF lets the client resize."""
    if DialectFeature.SBUF in agreement.agreed:
        return requested
    return default_buffer
