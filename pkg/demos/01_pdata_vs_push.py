"""
Request-response vs. streaming transfers over a wide-area path
==============================================================

The mover's native discipline solicits every 256 kB packet with a header
round trip, so each packet costs rtt + packet/rate.  On a LAN the round
trip is negligible; over a ~60 km WAN it eats almost half the throughput.
A push-style variant pays the round trip once and streams the rest.
"""

from hsmsim import (PipelineStages, pdata_push_transfer_time,
                    pdata_steady_rate, rational, serial_pipeline_rate)

PACKET = rational(262144)          # one solicited packet: 256 kB
BOTTLENECK = rational(80e6)        # the mover's disk is the slowest stage
LAN_RTT = rational(2.0e-4)
WAN_RTT = rational(3.5e-3)
FILE = rational(2e9)

# steady rate of the solicited protocol: one packet per (rtt + packet/rate)
lan = pdata_steady_rate(PACKET, LAN_RTT, BOTTLENECK)
wan = pdata_steady_rate(PACKET, WAN_RTT, BOTTLENECK)

print("solicited (per-packet header exchange):")
print(f"  LAN  {float(lan / 1e6):7.2f} MB/s")
print(f"  WAN  {float(wan / 1e6):7.2f} MB/s   ratio {float(wan / lan):.3f}")

# the push variant sets up once, then streams a 2 GB file
push_lan = FILE / pdata_push_transfer_time(FILE, LAN_RTT, BOTTLENECK)
push_wan = FILE / pdata_push_transfer_time(FILE, WAN_RTT, BOTTLENECK)

print("push (single setup round trip):")
print(f"  LAN  {float(push_lan / 1e6):7.2f} MB/s")
print(f"  WAN  {float(push_wan / 1e6):7.2f} MB/s   ratio {float(push_wan / push_lan):.5f}")

# when stages do NOT overlap, rates combine harmonically: a tape drive
# feeding a disk feeding the network is far slower than its slowest stage
serial = serial_pipeline_rate(PipelineStages((rational(80e6), rational(80e6),
                                              rational(40e6))))
overlap = serial_pipeline_rate(PipelineStages((rational(80e6), rational(80e6),
                                               rational(40e6)), "parallel"))
print("three-stage pipeline at 80/80/40 MB/s:")
print(f"  store-and-forward  {float(serial / 1e6):5.1f} MB/s")
print(f"  fully overlapped   {float(overlap / 1e6):5.1f} MB/s")
