"""
TCP windows, the bandwidth-delay product, and parallel streams
==============================================================

A single TCP session cannot exceed window/rtt.  Sweeping the socket buffer
shows the WAN curve trailing the LAN curve until the window covers the
bandwidth-delay product, after which both saturate on the host CPU.  Where
big windows are not available, parallel streams buy the same coverage.
"""

from hsmsim import (build_testbed, netperf_sweep, parallel_stream_aggregate,
                    rational)

tb = build_testbed()
client, mover = tb.client.endpoint, tb.movers[0].endpoint

# memory-to-memory sweep over both paths, like a netperf campaign
buffers = [rational(b) for b in (16384, 65536, 262144, 1048576, 8388608)]
rows = netperf_sweep(buffers, [tb.lan, tb.wan], client, mover)

print(f"{'buffer':>9}  {'LAN MB/s':>9}  {'WAN MB/s':>9}")
by = {(path, buf): rate for path, buf, rate in rows}
for buf in buffers:
    lan, wan = by[("lan", buf)], by[("wan", buf)]
    print(f"{int(buf):>9}  {float(lan / 1e6):>9.2f}  {float(wan / 1e6):>9.2f}")

# the WAN needs window >= capacity * rtt to fill the pipe
bdp = tb.wan.capacity * tb.wan.rtt
print(f"\nWAN bandwidth-delay product: {float(bdp / 1e3):.0f} kB")

# stuck with 100 kB windows?  open several sockets at once
print(f"\n{'streams':>8}  {'100kB agg':>10}  {'1MB agg':>10}")
for n in (1, 2, 3, 4):
    small = parallel_stream_aggregate(tb.wan, rational(100000), n, client, mover)
    large = parallel_stream_aggregate(tb.wan, rational(1048576), n, client, mover)
    print(f"{n:>8}  {float(small / 1e6):>10.2f}  {float(large / 1e6):>10.2f}")
print("four small-window streams triple the rate; big windows gain nothing")
