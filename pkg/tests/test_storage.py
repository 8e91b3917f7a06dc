"""Disk contention and tape-library scheduling vs. closed-form oracles."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from hsmsim.engine import ConfigError, Engine, rational
from hsmsim.storage import (Cartridge, TapeDrive, TapeLibrary, TapeLibrarySim,
                            aggregate_tape_throughput, disk,
                            disk_aggregate_rate, disk_stream_rate)


# --------------------------------------------------------------------------
# disks


def test_single_stream_gets_sequential_rate():
    d = disk("d", 80e6)
    assert disk_aggregate_rate(d, 1) == 80_000_000
    assert disk_stream_rate(d, 1) == 80_000_000


def test_two_streams_share_a_contended_disk():
    d = disk("d", 40e6, 0.2)
    assert disk_aggregate_rate(d, 2) == Fraction(40e6) / Fraction(6, 5)
    assert disk_stream_rate(d, 2) == Fraction(40e6) / Fraction(12, 5)


def test_zero_alpha_means_no_contention():
    d = disk("d", 50e6, 0)
    assert disk_aggregate_rate(d, 7) == 50_000_000


def test_disk_validation():
    with pytest.raises(ConfigError):
        disk("d", 0)
    with pytest.raises(ConfigError):
        disk("d", 10, -0.1)
    with pytest.raises(ConfigError):
        disk_aggregate_rate(disk("d", 10), 0)


@given(st.integers(1, 50), st.integers(1, 50))
def test_aggregate_never_grows_with_streams(n, m):
    d = disk("d", 80e6, 0.2)
    lo, hi = sorted((n, m))
    assert disk_aggregate_rate(d, hi) <= disk_aggregate_rate(d, lo)
    assert disk_stream_rate(d, hi) <= disk_stream_rate(d, lo)


# --------------------------------------------------------------------------
# tape library


RATE = Fraction(14_000_000)
EXCHANGE = Fraction(90)


def library(n_drives=4, accessors=2, files=None, premounted=()):
    """files: {file_id: (cartridge, size)}"""
    files = files or {}
    carts: dict[str, Cartridge] = {}
    for fid, (cart, size) in files.items():
        carts.setdefault(cart, Cartridge(cart, {})).files[fid] = rational(size)
    drives = [TapeDrive(f"t{i}", RATE) for i in range(n_drives)]
    for drive, cart in zip(drives, premounted):
        drive.mounted = cart
        carts.setdefault(cart, Cartridge(cart, {}))
    return TapeLibrary(drives, carts, accessors=accessors, exchange_time=EXCHANGE)


def run_reads(lib, file_ids):
    eng = Engine()
    sim = TapeLibrarySim(eng, lib)
    for fid in file_ids:
        sim.request_read(fid)
    eng.run_until_idle()
    return sim, {fid: done for fid, _, done in sim.completions}


def test_two_mounts_proceed_in_parallel():
    lib = library(files={"f0": ("c0", 14e6 * 10), "f1": ("c1", 14e6 * 10)})
    _, done = run_reads(lib, ["f0", "f1"])
    assert done == {"f0": Fraction(100), "f1": Fraction(100)}


def test_third_mount_waits_for_an_accessor():
    files = {f"f{i}": (f"c{i}", 14e6 * 10) for i in range(3)}
    _, done = run_reads(library(files=files), ["f0", "f1", "f2"])
    # both arms busy until t=90; the third exchange runs 90..180
    assert done["f0"] == done["f1"] == Fraction(100)
    assert done["f2"] == Fraction(190)


def test_premounted_cartridge_skips_the_robot():
    lib = library(files={"f0": ("c0", 14e6 * 10)}, premounted=("c0",))
    _, done = run_reads(lib, ["f0"])
    assert done["f0"] == Fraction(10)


def test_same_cartridge_reads_never_interleave():
    files = {"f0": ("c0", 14e6 * 10), "f1": ("c0", 14e6 * 30)}
    _, done = run_reads(library(files=files), ["f0", "f1"])
    assert done["f0"] == Fraction(100)
    assert done["f1"] == Fraction(130)


def test_eviction_costs_a_double_exchange():
    # one arm, two drives, three cartridges: the third mount must evict
    files = {f"f{i}": (f"c{i}", 14e6 * 10) for i in range(3)}
    lib = library(n_drives=2, accessors=1, files=files)
    _, done = run_reads(lib, ["f0", "f1", "f2"])
    assert done["f0"] == Fraction(100)
    assert done["f1"] == Fraction(190)   # arm freed at 90, mounted at 180
    # arm freed at 180; LRU drive t0 is evicted: 2*90 exchange, read ends 370
    assert done["f2"] == Fraction(370)
    assert lib.drives[0].mounted == "c2"


def test_empty_drive_preferred_over_eviction():
    files = {"f0": ("c0", 14e6), "f1": ("c1", 14e6)}
    lib = library(n_drives=2, accessors=2, files=files, premounted=("cX",))
    _, done = run_reads(lib, ["f0", "f1"])
    # one drive is empty; only the second mount pays the eviction penalty
    assert sorted(done.values()) == [Fraction(91), Fraction(181)]
    assert {d.mounted for d in lib.drives} == {"c0", "c1"}


def queue_oracle(assignment, sizes, accessors=2):
    """Completion times for reads all submitted at t=0, no eviction.

    assignment[i] names the cartridge of file i; cartridges mount FIFO in
    first-request order, each exchange holding one arm for EXCHANGE seconds,
    then the drive drains its files in request order at RATE.
    """
    order: list[str] = []
    for cart in assignment:
        if cart not in order:
            order.append(cart)
    mounted = {cart: EXCHANGE * (idx // accessors) + EXCHANGE
               for idx, cart in enumerate(order)}
    clock = dict(mounted)
    done = {}
    for i, cart in enumerate(assignment):
        clock[cart] += Fraction(sizes[i]) / RATE
        done[f"f{i}"] = clock[cart]
    return done


def test_fifo_schedule_matches_queue_oracle():
    carts = ["c0", "c1", "c2", "c3"]
    sizes = [14e6 * 5, 14e6 * 20, 14e6 * 45]
    cases = 0
    for n in range(1, 6):
        for picks in product(range(4), repeat=n):
            assignment = [carts[p] for p in picks]
            chosen = [sizes[i % 3] for i in range(n)]
            files = {}
            for i, cart in enumerate(assignment):
                files[f"f{i}"] = (cart, chosen[i])
            _, done = run_reads(library(files=files), [f"f{i}" for i in range(n)])
            assert done == queue_oracle(assignment, chosen), (assignment, chosen)
            cases += 1
    assert cases == sum(4 ** n for n in range(1, 6))


def test_sim_ends_with_resources_released():
    files = {f"f{i}": (f"c{i % 3}", 14e6 * (i + 1)) for i in range(6)}
    sim, done = run_reads(library(files=files), sorted(files))
    assert len(sim.completions) == 6
    assert sim._free_accessors == sim.lib.accessors
    assert not sim._mounting and not sim._pending
    assert all(not q for q in sim._drive_queues.values())
    assert all(not busy for busy in sim._drive_busy.values())
    assert all(t >= 0 for _, _, t in sim.completions)


def test_completion_order_is_deterministic():
    files = {f"f{i}": (f"c{i % 2}", 14e6 * 10) for i in range(4)}
    runs = [run_reads(library(files=files), sorted(files))[0].completions
            for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_unknown_file_rejected():
    lib = library(files={"f0": ("c0", 1)})
    eng = Engine()
    sim = TapeLibrarySim(eng, lib)
    with pytest.raises(ConfigError):
        sim.request_read("nope")


def test_file_on_two_cartridges_rejected():
    carts = {"a": Cartridge("a", {"f": Fraction(1)}),
             "b": Cartridge("b", {"f": Fraction(1)})}
    with pytest.raises(ConfigError):
        TapeLibrary([TapeDrive("t0", RATE)], carts)


def test_premounted_throughput_is_linear_in_drives():
    lib = library()
    for n in range(5):
        assert aggregate_tape_throughput(lib, n) == n * RATE
    with pytest.raises(ConfigError):
        aggregate_tape_throughput(lib, 5)
