"""Result rows and the CSV schema every consumer reads.

Header: scenario,sweep,path,throughput_MBps,makespan_s — one row per
(sweep value, series). `path` is the series label (LAN, WAN, offdrive, ...).
Throughput is decimal megabytes per second; values are formatted with fixed
precision so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

CSV_HEADER = "scenario,sweep,path,throughput_MBps,makespan_s"

_MB = Fraction(1_000_000)


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    sweep: str
    path: str
    throughput_Bps: Fraction
    makespan_s: Fraction

    def csv_line(self) -> str:
        thr = float(self.throughput_Bps / _MB)
        mk = float(self.makespan_s)
        return f"{self.scenario},{self.sweep},{self.path},{thr:.6f},{mk:.6f}"


def to_csv(rows: list[ResultRow]) -> str:
    return "\n".join([CSV_HEADER, *(r.csv_line() for r in rows)]) + "\n"
