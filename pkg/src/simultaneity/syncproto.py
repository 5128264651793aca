"""Four-timestamp (PTP-style) offset and delay estimation on the simulated network."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from . import clocknet
from .conventions import check_epsilon
from .clocknet import RECEIVE, SEND, ClockModel, Scenario, SyncSession, TraceEvent
from .errors import ValidationError

SYNC_CSV_HEADER = ("t1", "t2", "t3", "t4", "offset", "delay")


def halve(n: int) -> int:
    """``n / 2`` rounded half to even, in pure integer arithmetic."""
    q, r = divmod(n, 2)
    return q + (r and q % 2)


@dataclass(frozen=True)
class SyncExchange:
    """t1: master send, t2: slave receive, t3: slave send, t4: master receive.

    t1/t4 are master-clock readings, t2/t3 slave-clock readings.
    """

    t1: int
    t2: int
    t3: int
    t4: int

    def __post_init__(self) -> None:
        if self.t3 < self.t2:
            raise ValidationError(f"slave replied before receiving: t3={self.t3} < t2={self.t2}")
        if self.t4 < self.t1:
            raise ValidationError(f"negative master round trip: t4={self.t4} < t1={self.t1}")

    @property
    def round_trip(self) -> int:
        """Path round trip with slave residence removed; needs each clock only against itself."""
        return (self.t4 - self.t1) - (self.t3 - self.t2)


@dataclass(frozen=True)
class SyncEstimate:
    offset_ns: int
    delay_ns: int


def raw_offset_delay(x: SyncExchange) -> tuple[Fraction, Fraction]:
    """Unrounded offset and delay, exact."""
    fwd, rev = x.t2 - x.t1, x.t4 - x.t3
    return Fraction(fwd - rev, 2), Fraction(fwd + rev, 2)


def ptp_estimate(x: SyncExchange) -> SyncEstimate:
    fwd, rev = x.t2 - x.t1, x.t4 - x.t3
    return SyncEstimate(offset_ns=halve(fwd - rev), delay_ns=halve(fwd + rev))


def collect_exchanges(trace: Sequence[TraceEvent], sync_id: str | None = None) -> list[SyncExchange]:
    """Rebuild completed exchanges from sync request/reply messages in ``trace``.

    Exchanges are returned in repetition order; incomplete ones are skipped.
    """
    stamps: dict[tuple[str, int], dict[str, int]] = {}
    for e in trace:
        if not e.msg_id or "#" not in e.msg_id:
            continue
        sid, _, rest = e.msg_id.rpartition("#")
        k, _, leg = rest.partition(".")
        if leg not in ("req", "rep") or not k.isdigit():
            continue
        if sync_id is not None and sid != sync_id:
            continue
        slot = {("req", SEND): "t1", ("req", RECEIVE): "t2", ("rep", SEND): "t3", ("rep", RECEIVE): "t4"}
        name = slot.get((leg, e.kind))
        if name:
            stamps.setdefault((sid, int(k)), {})[name] = e.displayed_ns
    return [
        SyncExchange(**s)
        for _, s in sorted(stamps.items())
        if len(s) == 4
    ]


def run_sync_exchanges(
    scenario: Scenario,
    master: str,
    slave: str,
    repetitions: int = 1,
    *,
    start_ns: int = 0,
    interval_ns: int = 1_000_000,
    residence_ns: int = 0,
) -> list[SyncExchange]:
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    scenario.link_between(master, slave)  # ConfigError if absent
    session = SyncSession("sync", master, slave, start_ns, repetitions, interval_ns, residence_ns)
    trace = clocknet.run(scenario.with_traffic([session]))
    return collect_exchanges(trace, "sync")


def run_sync(scenario: Scenario, master: str, slave: str, repetitions: int = 1, **kwargs) -> list[SyncEstimate]:
    """Run ``repetitions`` exchanges over the simulated link using the nodes' actual clocks."""
    return [ptp_estimate(x) for x in run_sync_exchanges(scenario, master, slave, repetitions, **kwargs)]


def apply_correction(clock: ClockModel, estimate: SyncEstimate) -> ClockModel:
    """Step the clock back by the estimated offset. Applying twice corrects twice."""
    return replace(clock, offset_ns=clock.offset_ns - estimate.offset_ns)


def reassign_slave(x: SyncExchange, eps) -> tuple:
    """Slave timestamps re-expressed under Reichenbach synchrony ``eps``.

    The slave timeline is shifted so that its receive stamp would equal
    ``t1 + eps * RTT`` if it were currently Einstein-synchronised; i.e. by
    ``(eps - 1/2) * RTT``. Returns exact ``(t1, t2', t3', t4)``.
    """
    check_epsilon(eps)
    shift = (Fraction(eps) - Fraction(1, 2)) * x.round_trip
    return (x.t1, x.t2 + shift, x.t3 + shift, x.t4)


def offset_under_convention(x: SyncExchange, eps) -> Fraction:
    t1, t2, t3, t4 = reassign_slave(x, eps)
    return ((t2 - t1) - (t4 - t3)) / 2


def sync_csv(exchanges: Sequence[SyncExchange]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SYNC_CSV_HEADER)
    for x in exchanges:
        est = ptp_estimate(x)
        writer.writerow((x.t1, x.t2, x.t3, x.t4, est.offset_ns, est.delay_ns))
    return buf.getvalue()

