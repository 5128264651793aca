"""One-way delay, delay variation, round-trip time and the forbidden zone.

A one-way delay subtracts readings of two different clocks, so its value
depends on how those clocks were synchronised and may be negative. Round-trip
time and delay variation only ever subtract readings of one clock and are
unaffected by constant offsets.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .clocknet import RECEIVE, SEND, Scenario, TraceEvent
from .errors import ValidationError


@dataclass(frozen=True)
class DelaySample:
    msg_id: str
    src: str
    dst: str
    send_displayed_ns: int
    recv_displayed_ns: int
    send_true_ns: int
    recv_true_ns: int

    def __post_init__(self) -> None:
        if self.recv_true_ns <= self.send_true_ns:
            raise ValidationError(f"{self.msg_id}: received at or before it was sent (true time)")


def samples_from_trace(trace: Sequence[TraceEvent]) -> list[DelaySample]:
    """Pair every send with its receive, in order of sending."""
    sends = {e.msg_id: e for e in trace if e.kind == SEND}
    out = []
    for e in trace:
        if e.kind != RECEIVE:
            continue
        s = sends.get(e.msg_id)
        if s is None:
            raise ValidationError(f"unmatched receive {e.msg_id!r}")
        out.append(DelaySample(e.msg_id, s.node, e.node, s.displayed_ns, e.displayed_ns, s.true_time_ns, e.true_time_ns))
    out.sort(key=lambda d: (d.send_true_ns, d.msg_id))
    return out


def one_way_delay(s: DelaySample) -> int:
    """Receiver reading minus sender reading. Negative values are data, not errors."""
    return s.recv_displayed_ns - s.send_displayed_ns


def pdv(a: DelaySample, b: DelaySample) -> int:
    if (a.src, a.dst) != (b.src, b.dst):
        raise ValidationError(f"delay variation needs one path: {a.src}->{a.dst} vs {b.src}->{b.dst}")
    return abs(one_way_delay(a) - one_way_delay(b))


def rtt(request: DelaySample, reply: DelaySample) -> int:
    """Round trip on the requester's clock alone."""
    if (reply.src, reply.dst) != (request.dst, request.src):
        raise ValidationError(f"{reply.msg_id} does not answer {request.msg_id}")
    if reply.send_true_ns < request.recv_true_ns:
        raise ValidationError(f"{reply.msg_id} was sent before {request.msg_id} arrived")
    return reply.recv_displayed_ns - request.send_displayed_ns


def request_reply_pairs(samples: Sequence[DelaySample]) -> list[tuple[DelaySample, DelaySample]]:
    """Match sync requests ``X.req`` with their replies ``X.rep``."""
    by_id = {s.msg_id: s for s in samples}
    pairs = []
    for s in samples:
        if s.msg_id.endswith(".req"):
            reply = by_id.get(s.msg_id[: -len(".req")] + ".rep")
            if reply is not None:
                pairs.append((s, reply))
    return pairs


@dataclass
class ForbiddenZoneReport:
    total_samples: int
    violating_samples: int
    min_margin_ns: Optional[int]
    predicted_violation: bool
    per_link: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "total_samples": self.total_samples,
            "violating_samples": self.violating_samples,
            "min_margin_ns": self.min_margin_ns,
            "predicted_violation": self.predicted_violation,
            "per_link": self.per_link,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1) + "\n"

    def summary(self) -> str:
        margin = "n/a" if self.min_margin_ns is None else f"{self.min_margin_ns / 1000:.3f} us"
        return (
            f"{self.violating_samples}/{self.total_samples} samples received before sent; "
            f"min margin {margin}; predicted={self.predicted_violation}"
        )


def forbidden_zone(trace: Sequence[TraceEvent], scenario: Scenario) -> ForbiddenZoneReport:
    """Count receive-before-send readings and predict them from ground truth.

    A direction src->dst is predicted to violate when
    ``offset(dst) - offset(src) < -delay(src->dst)``. The prediction ignores
    noise, jitter and rate error.
    """
    samples = samples_from_trace(trace)
    per_link: dict[str, dict] = {}
    for s in samples:
        key = f"{s.src}->{s.dst}"
        entry = per_link.get(key)
        if entry is None:
            link = scenario.link_between(s.src, s.dst)
            skew = scenario.node(s.dst).clock.offset_ns - scenario.node(s.src).clock.offset_ns
            delay = link.delay(s.src, s.dst)
            entry = per_link[key] = {
                "samples": 0,
                "violations": 0,
                "min_margin_ns": None,
                "skew_ns": skew,
                "delay_ns": delay,
                "predicted_violation": skew < -delay,
            }
        owd = one_way_delay(s)
        entry["samples"] += 1
        entry["violations"] += owd < 0
        if entry["min_margin_ns"] is None or owd < entry["min_margin_ns"]:
            entry["min_margin_ns"] = owd
    margins = [e["min_margin_ns"] for e in per_link.values()]
    return ForbiddenZoneReport(
        total_samples=len(samples),
        violating_samples=sum(e["violations"] for e in per_link.values()),
        min_margin_ns=min(margins) if margins else None,
        predicted_violation=any(e["predicted_violation"] for e in per_link.values()),
        per_link=dict(sorted(per_link.items())),
    )


OWD_CSV_HEADER = ("msg_id", "src", "dst", "send_displayed_ns", "recv_displayed_ns", "owd_ns")


def owd_csv(samples: Sequence[DelaySample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(OWD_CSV_HEADER)
    for s in samples:
        writer.writerow((s.msg_id, s.src, s.dst, s.send_displayed_ns, s.recv_displayed_ns, one_way_delay(s)))
    return buf.getvalue()
