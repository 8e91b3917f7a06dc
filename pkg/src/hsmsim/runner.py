"""Experiment runner: executes scenarios, emits CSV rows, checks expectations.

Each scenario kind maps to one experiment shape (a buffer sweep, a
concurrency ladder, a tape schedule, ...). Rows come back as exact rationals
and are formatted once at CSV write time, so reruns are byte-identical; a
scenario with repetitions > 1 is executed repeatedly and the runs are
required to agree exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .dialect import select_data_path
from .engine import ConfigError, Engine, InternalError, rational
from .network import netperf_sweep, parallel_stream_aggregate
from .protocols import (ClientApi, MoverPdata, PdataPush, Pftp, Relay,
                        StorageRef, TransferRun, TransferSpec,
                        client_api_sweep, run_pftp_session)
from .results import ResultRow, to_csv
from .scenario import Scenario, parse_mapping, read_job_text
from .storage import Cartridge, TapeLibrarySim
from .testbed import Testbed
from .xrsl import extract_stage_ins, parse_xrsl, stage_in_to_transfers


def _frac(table: dict[str, str], key: str, default) -> Fraction:
    return rational(table.get(key, default))


def _int(table: dict[str, str], key: str, default: int) -> int:
    try:
        return int(table.get(key, default))
    except ValueError:
        raise ConfigError(f"{key}: not an integer") from None


def _sweep_ints(sc: Scenario) -> list[tuple[str, int]]:
    out = []
    for raw in sc.sweep_values:
        try:
            out.append((raw, int(raw)))
        except ValueError:
            raise ConfigError(f"scenario {sc.id}: sweep value {raw!r} is not an integer") from None
    return out


def _sweep_fracs(sc: Scenario) -> list[tuple[str, Fraction]]:
    return [(raw, rational(raw)) for raw in sc.sweep_values]


def _protocol_of(sc: Scenario, tb: Testbed):
    kind = sc.protocol.get("kind", "pftp")
    if kind == "pdata":
        return MoverPdata(_frac(sc.protocol, "packet_B", tb.pdata_packet))
    if kind == "pdata_push":
        return PdataPush()
    if kind == "pftp":
        return Pftp(_int(sc.protocol, "pwidth", 1))
    if kind == "client_api":
        return ClientApi(_frac(sc.protocol, "api_buffer_B", 1048576))
    raise ConfigError(f"unknown protocol kind {kind!r}")


def _sink_of(sc: Scenario, tb: Testbed) -> StorageRef:
    kind = sc.transfer.get("sink", "null")
    if kind == "null":
        return StorageRef("null", tb.client.name)
    if kind == "client_memory":
        return StorageRef("memory", tb.client.name)
    if kind == "client_disk":
        return StorageRef("disk", tb.client.name, tb.client.disks[0])
    raise ConfigError(f"unknown sink {kind!r}")


def _mover_disks_interleaved(tb: Testbed, host_name: str | None = None):
    """(host, disk) list ordered so consecutive picks hit different hosts."""
    if host_name is not None:
        host = tb.host(host_name)
        return [(host.name, d) for d in host.disks]
    disks = [(h.name, d) for h in tb.movers for d in h.disks]
    disks.sort(key=lambda hd: (hd[1].name.split(".")[-1], hd[0]))
    return disks


# --------------------------------------------------------------------------
# kind runners


def _run_netperf(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    buffers = [v for _, v in _sweep_fracs(sc)]
    rows = []
    for label, p in (("LAN", tb.lan), ("WAN", tb.wan)):
        sweep = netperf_sweep(buffers, [p], tb.client.endpoint, tb.movers[0].endpoint)
        for (raw, _), (_, _, rate) in zip(_sweep_fracs(sc), sweep):
            rows.append(ResultRow(sc.id, raw, label, rate, tb.file_size / rate))
    return rows


def _run_streams(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    windows = parse_mapping(sc.protocol.get("windows_B", "100kB=100000 1MB=1048576"),
                            f"{sc.id}: protocol.windows_B")
    rows = []
    for label, w_text in windows.items():
        window = rational(w_text)
        for raw, n in _sweep_ints(sc):
            agg = parallel_stream_aggregate(tb.wan, window, n,
                                            tb.client.endpoint, tb.movers[0].endpoint)
            rows.append(ResultRow(sc.id, raw, label, agg, n * tb.file_size / agg))
    return rows


def _run_client_api(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    buffers = [v for _, v in _sweep_fracs(sc)]
    rows = []
    for label, p, direction in (("LAN_read", tb.lan, "read"), ("WAN_read", tb.wan, "read"),
                                ("LAN_write", tb.lan, "write"), ("WAN_write", tb.wan, "write")):
        for (raw, _), (_, rate) in zip(_sweep_fracs(sc),
                                       client_api_sweep(tb, buffers, direction, p)):
            rows.append(ResultRow(sc.id, raw, label, rate, tb.file_size / rate))
    return rows


def _run_pftp(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    size = _frac(sc.transfer, "size_B", tb.file_size)
    proto = _protocol_of(sc, tb)
    sink = _sink_of(sc, tb)
    rows = []
    for label, p in (("WAN", tb.wan), ("LAN", tb.lan)):
        for raw, n in _sweep_ints(sc):
            mover = tb.movers[0]
            template = TransferSpec(f"pftp_{label}", size,
                                    StorageRef("disk", mover.name, mover.disks[0]),
                                    sink, proto, p)
            completions = run_pftp_session(tb, template, n)
            makespan = max(t for _, t in completions)
            rows.append(ResultRow(sc.id, raw, label, n * size / makespan, makespan))
    return rows


def _run_tape(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    size = _frac(sc.transfer, "size_B", tb.file_size)
    rows = []
    for series in ("offdrive", "premounted"):
        for raw, n in _sweep_ints(sc):
            cartridges = {f"cart{i}": Cartridge(f"cart{i}", {f"file{i}": size})
                          for i in range(n)}
            lib = tb.tape.build(cartridges)
            if series == "premounted":
                for i in range(min(n, len(lib.drives))):
                    lib.drives[i].mounted = f"cart{i}"
            engine = Engine()
            sim = TapeLibrarySim(engine, lib)
            for i in range(n):
                sim.request_read(f"file{i}")
            engine.run_until_idle()
            if len(sim.completions) != n:
                raise InternalError(f"tape run lost jobs: {len(sim.completions)}/{n}")
            makespan = max(done for _, _, done in sim.completions)
            rows.append(ResultRow(sc.id, raw, series, n * size / makespan, makespan))
    return rows


def _run_write(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    size = _frac(sc.transfer, "size_B", tb.file_size)
    proto = _protocol_of(sc, tb)
    rows = []
    disks = _mover_disks_interleaved(tb)
    for label, p in (("WAN", tb.wan), ("LAN", tb.lan)):
        for raw, n in _sweep_ints(sc):
            specs = []
            for i in range(n):
                host, dsk = disks[i % len(disks)]
                specs.append(TransferSpec(
                    f"write.{i}", size,
                    StorageRef("disk", tb.client.name, tb.client.disks[0]),
                    StorageRef("disk", host, dsk), proto, p))
            run = TransferRun(tb, specs)
            run.run()
            rows.append(ResultRow(sc.id, raw, label, n * size / run.makespan, run.makespan))
    return rows


def _run_relay(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    size = _frac(sc.transfer, "size_B", tb.file_size)
    sink = _sink_of(sc, tb)
    pftpd = sc.deployment.get("pftpd_host", tb.movers[0].name)
    data_sep = sc.deployment.get("data_host",
                                 tb.movers[1].name if len(tb.movers) > 1 else pftpd)
    cases = (
        ("gsi_separated", "gsi", pftpd, data_sep),
        ("gsi_colocated", "gsi", pftpd, pftpd),
        ("kerberos_direct", "kerberos", tb.core.name, pftpd),
    )
    rows = []
    for label, deployment, pftpd_host, data_host in cases:
        data_path = select_data_path(deployment, pftpd_host, data_host)
        disks = _mover_disks_interleaved(tb, data_host)
        for raw, n in _sweep_ints(sc):
            specs = []
            for i in range(n):
                host, dsk = disks[i % len(disks)]
                specs.append(TransferSpec(
                    f"{label}.{i}", size, StorageRef("disk", host, dsk),
                    sink, Pftp(1), tb.wan, data_path=data_path))
            run = TransferRun(tb, specs)
            run.run()
            rows.append(ResultRow(sc.id, raw, label, n * size / run.makespan, run.makespan))
    return rows


def _run_stagein(sc: Scenario, tb: Testbed) -> list[ResultRow]:
    if "xrsl" not in sc.job:
        raise ConfigError(f"scenario {sc.id}: job.xrsl is required for kind=stagein")
    text = read_job_text(sc, sc.job["xrsl"])
    doc = parse_xrsl(text)
    requests, _diagnostics = extract_stage_ins(doc)
    locations = parse_mapping(sc.job.get("file_locations", ""), f"{sc.id}: job.file_locations")
    deployment = sc.deployment.get("pftpd", "gsi")
    pftpd_host = sc.deployment.get("pftpd_host", tb.movers[0].name)
    specs = stage_in_to_transfers(requests, tb, deployment, pftpd_host, locations)
    if not specs:
        return []
    run = TransferRun(tb, specs)
    flows = run.run()
    rows = []
    for i, spec in enumerate(specs):
        flow = flows[spec.name]
        label = "relay" if isinstance(spec.data_path, Relay) else "direct"
        rows.append(ResultRow(sc.id, str(i + 1), label,
                              spec.size / flow.finished_at, flow.finished_at))
    return rows


_RUNNERS = {
    "netperf": _run_netperf,
    "stream_scaling": _run_streams,
    "client_api": _run_client_api,
    "pftp_concurrency": _run_pftp,
    "tape_read": _run_tape,
    "write_contention": _run_write,
    "relay_compare": _run_relay,
    "stagein": _run_stagein,
}


def run_scenario(sc: Scenario) -> list[ResultRow]:
    """Execute a scenario; repeated runs must agree exactly (and are checked)."""
    runner = _RUNNERS.get(sc.kind)
    if runner is None:
        raise ConfigError(f"no runner for kind {sc.kind!r}")
    rows = runner(sc, sc.build_testbed())
    for _ in range(sc.repetitions - 1):
        again = runner(sc, sc.build_testbed())
        if again != rows:
            raise InternalError(f"scenario {sc.id}: repetition diverged")
    return rows


# --------------------------------------------------------------------------
# expectation checks (--check)


def _by(rows: list[ResultRow]) -> dict[tuple[str, str], ResultRow]:
    return {(r.path, r.sweep): r for r in rows}


def _within(a: Fraction, b: Fraction, rel: str) -> bool:
    return abs(a - b) <= rational(rel) * abs(b)


def _check_netperf(rows):
    t = _by(rows)
    bad = []
    for (path, sweep), row in t.items():
        if path != "WAN" or rational(sweep) < 1048576:
            continue
        lan = t[("LAN", sweep)]
        if not _within(row.throughput_Bps, lan.throughput_Bps, "0.02"):
            bad.append(f"buffer {sweep}: WAN {row.throughput_Bps} not within 2% of LAN")
    if ("WAN", "65536") in t and ("LAN", "65536") in t:
        if t[("LAN", "65536")].throughput_Bps < 3 * t[("WAN", "65536")].throughput_Bps:
            bad.append("64kB buffer: LAN/WAN ratio below 3x")
    return bad


def _check_streams(rows):
    t = _by(rows)
    bad = []
    if ("100kB", "4") in t and ("100kB", "1") in t:
        if t[("100kB", "4")].throughput_Bps < 3 * t[("100kB", "1")].throughput_Bps:
            bad.append("100kB windows: 4-stream aggregate below 3x single")
    if ("1MB", "4") in t and ("1MB", "1") in t:
        lim = Fraction(105, 100) * t[("1MB", "1")].throughput_Bps
        if t[("1MB", "4")].throughput_Bps > lim:
            bad.append("1MB windows: 4-stream aggregate above 1.05x single")
    return bad


def _check_client_api(rows):
    t = _by(rows)
    bad = []
    if ("WAN_read", "1048576") in t and ("LAN_read", "1048576") in t:
        ratio = t[("WAN_read", "1048576")].throughput_Bps / t[("LAN_read", "1048576")].throughput_Bps
        if not Fraction(45, 100) <= ratio <= Fraction(55, 100):
            bad.append(f"1MB API buffer: WAN/LAN read ratio {float(ratio):.3f} outside [0.45, 0.55]")
    for series in ("LAN_read", "WAN_read", "LAN_write", "WAN_write"):
        if (series, "2097152") in t and (series, "8388608") in t:
            if not _within(t[(series, "2097152")].throughput_Bps,
                           t[(series, "8388608")].throughput_Bps, "0.01"):
                bad.append(f"{series}: not saturated between 2MB and 8MB buffers")
    return bad


def _check_pftp(rows):
    t = _by(rows)
    bad = []
    # the WAN ladder climbs all the way to 4 files; the LAN one may hit the
    # gigabit link earlier, so it is only required not to regress
    wan = [t[("WAN", str(n))].throughput_Bps
           for n in range(1, 5) if ("WAN", str(n)) in t]
    if len(wan) == 4 and not all(a < b for a, b in zip(wan, wan[1:])):
        bad.append("WAN: aggregate not strictly increasing from 1 to 4 files")
    lan = [t[("LAN", str(n))].throughput_Bps
           for n in range(1, 5) if ("LAN", str(n)) in t]
    if any(b < a for a, b in zip(lan, lan[1:])):
        bad.append("LAN: aggregate decreased between 1 and 4 files")
    for series in ("WAN", "LAN"):
        if (series, "4") in t:
            top = t[(series, "4")].throughput_Bps
            for n in (5, 6):
                if (series, str(n)) in t and t[(series, str(n))].throughput_Bps > top:
                    bad.append(f"{series}: aggregate increased from 4 to {n} files")
    return bad


def _check_tape(rows):
    t = _by(rows)
    bad = []
    have = all(("offdrive", str(n)) in t for n in (1, 2, 3))
    if have:
        m1 = t[("offdrive", "1")].makespan_s
        m2 = t[("offdrive", "2")].makespan_s
        m3 = t[("offdrive", "3")].makespan_s
        if m3 / m2 <= Fraction(13, 10):
            bad.append(f"offdrive: makespan(3)/makespan(2) = {float(m3 / m2):.3f} not > 1.3")
        if m2 / m1 >= Fraction(11, 10):
            bad.append(f"offdrive: makespan(2)/makespan(1) = {float(m2 / m1):.3f} not < 1.1")
    if ("premounted", "1") in t:
        unit = t[("premounted", "1")].throughput_Bps
        for (path, sweep), row in t.items():
            if path == "premounted" and not _within(row.throughput_Bps, int(sweep) * unit, "0.01"):
                bad.append(f"premounted: {sweep} drives not linear within 1%")
    return bad


def _check_write(rows):
    t = _by(rows)
    bad = []
    for series in ("WAN", "LAN"):
        ladder = [t[(series, str(n))].throughput_Bps
                  for n in range(1, 9) if (series, str(n)) in t]
        if any(b > a for a, b in zip(ladder, ladder[1:])):
            bad.append(f"{series}: write aggregate increased despite shared client disk")
    for (path, sweep), row in t.items():
        if path == "WAN" and ("LAN", sweep) in t:
            if not _within(row.throughput_Bps, t[("LAN", sweep)].throughput_Bps, "0.01"):
                bad.append(f"writes at {sweep} files: WAN differs from LAN beyond 1%")
    return bad


def _check_relay(rows):
    t = _by(rows)
    bad = []
    for (path, sweep), row in t.items():
        if path != "gsi_separated":
            continue
        coloc = t.get(("gsi_colocated", sweep))
        if coloc and row.throughput_Bps > Fraction(55, 100) * coloc.throughput_Bps:
            bad.append(f"{sweep} files: separated relay above 0.55x co-located")
    for (path, sweep), row in t.items():
        if path == "gsi_colocated" and ("kerberos_direct", sweep) in t:
            if not _within(row.throughput_Bps,
                           t[("kerberos_direct", sweep)].throughput_Bps, "0.01"):
                bad.append(f"{sweep} files: co-located GSI differs from kerberos direct")
    return bad


def _check_stagein(rows):
    if not rows:
        return ["no stage-in transfers produced"]
    return [f"transfer {r.sweep}: nonpositive throughput"
            for r in rows if r.throughput_Bps <= 0]


_CHECKS = {
    "fig3_netperf": _check_netperf,
    "fig4_streams": _check_streams,
    "fig5_client_api": _check_client_api,
    "fig6_pftp_read": _check_pftp,
    "fig7_tape": _check_tape,
    "fig8_write": _check_write,
    "fig9_relay": _check_relay,
    "xrsl_stagein": _check_stagein,
}


def check_scenario(sc: Scenario, rows: list[ResultRow]) -> list[str]:
    """Canned-scenario expectations; unknown ids have nothing to check."""
    check = _CHECKS.get(sc.id)
    if check is None:
        return []
    return [f"{sc.id}: {msg}" for msg in check(rows)]


# --------------------------------------------------------------------------
# suite driver


def run_suite(scenarios: list[Scenario], out_dir: str | Path,
              check: bool = False, jobs: int = 1) -> tuple[list[Path], list[str]]:
    """Run scenarios, write one CSV each; returns (written files, violations)."""
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    out = Path(out_dir)
    if not scenarios:
        return [], []
    out.mkdir(parents=True, exist_ok=True)
    if jobs == 1 or len(scenarios) == 1:
        results = [run_scenario(sc) for sc in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_scenario, scenarios))
    files = []
    violations = []
    for sc, rows in zip(scenarios, results):
        target = out / f"{sc.id}.csv"
        target.write_text(to_csv(rows))
        files.append(target)
        if check:
            violations.extend(check_scenario(sc, rows))
    return files, violations
