"""hsmsim: deterministic simulator of wide-area access to hierarchical storage.

A small discrete-event core drives models of TCP throughput over LAN/WAN
paths, mover-based transfer protocols (per-packet request/response, push
streaming, parallel ftp), disk and tape-library storage, FTP dialect
negotiation, and XRSL stage-in parsing. The `simulate` CLI runs canned
scenarios and writes CSV results.
"""

from .dialect import (DialectFeature, RequiredFeatureUnsupported,
                      SessionAgreement, SpeakerProfile, auth_handshake,
                      dialect_offer, negotiate, select_data_path)
from .engine import ConfigError, Engine, Event, InternalError, SimTime, rational
from .network import (Endpoint, FlowSet, NetPath, TcpSession, fair_share,
                      max_min_allocation, netperf_sweep,
                      parallel_stream_aggregate, session_rate_unconstrained,
                      water_fill)
from .protocols import (ClientApi, Direct, MoverPdata, PdataPush, Pftp,
                        PipelineStages, Relay, StorageRef, TransferRun,
                        TransferSpec, client_api_sweep, pdata_push_transfer_time,
                        pdata_steady_rate, pdata_transfer_time, relay_rate,
                        run_pdata_machine, run_pftp_session, run_relay_transfer,
                        serial_pipeline_rate, solo_rate)
from .results import CSV_HEADER, ResultRow, to_csv
from .scenario import (CANNED, Scenario, load_canned, load_scenario,
                       load_suite, parse_scenario_text)
from .storage import (Cartridge, Disk, TapeDrive, TapeLibrary, TapeLibrarySim,
                      aggregate_tape_throughput, disk_aggregate_rate,
                      disk_stream_rate)
from .testbed import DEFAULTS, Host, Testbed, build_testbed
from .runner import check_scenario, run_scenario, run_suite
from .xrsl import (ParseError, StageInRequest, ValidationError, XrslDocument,
                   extract_stage_ins, parse_url, parse_xrsl, render,
                   stage_in_to_transfers)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
