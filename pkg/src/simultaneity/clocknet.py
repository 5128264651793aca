"""Deterministic discrete-event network of imperfect clocks.

Every quantity is an integer number of nanoseconds. Each recorded
:class:`TraceEvent` carries both the simulator's coordinate time and the
reading of the local clock at that instant, so analyses can compare what
happened with what the clocks claim happened.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import json
import statistics
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .conventions import check_epsilon
from .errors import ConfigError, ValidationError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1
PPB = 10**9

SEND = "send"
RECEIVE = "receive"
TICK = "tick"
KINDS = (SEND, RECEIVE, TICK)

TRACE_CSV_HEADER = ("kind", "node", "msg_id", "true_time_ns", "displayed_ns")

_STD_NORMAL = statistics.NormalDist()


class CounterStream:
    """Counter-based Gaussian stream keyed by ``(seed, key, draw index)``.

    Draw ``i`` depends only on the key and ``i``, never on what other streams
    have consumed. Quacks like ``numpy.random.Generator.standard_normal``.
    """

    def __init__(self, seed: int, key: str):
        self.seed = seed
        self.key = key
        self.index = 0

    def draw(self, index: int) -> float:
        digest = hashlib.blake2b(
            f"{self.seed}|{self.key}|{index}".encode(), digest_size=8
        ).digest()
        # 53 random bits, shifted off both endpoints of (0, 1).
        u = ((int.from_bytes(digest, "big") >> 11) + 0.5) / 2**53
        return _STD_NORMAL.inv_cdf(u)

    def standard_normal(self) -> float:
        z = self.draw(self.index)
        self.index += 1
        return z


@dataclass(frozen=True)
class ClockModel:
    offset_ns: int = 0
    rate_ppb: int = 0
    noise_stddev_ns: int = 0

    def __post_init__(self) -> None:
        for name in ("offset_ns", "rate_ppb", "noise_stddev_ns"):
            if not isinstance(getattr(self, name), int):
                raise ValidationError(f"{name} must be an integer")
        if self.noise_stddev_ns < 0:
            raise ValidationError("noise_stddev_ns must be non-negative")


def _checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise OverflowError(f"clock value {value} outside the signed 64-bit range")
    return value


def read_clock(clock: ClockModel, true_time_ns: int, rng=None) -> int:
    """Displayed time of ``clock`` at coordinate time ``true_time_ns``.

    ``t + offset + round(rate_ppb * t / 1e9) + noise``; rounding is
    half-to-even and noise is ``round(noise_stddev_ns * rng.standard_normal())``.
    """
    if true_time_ns < 0:
        raise ValidationError(f"true time must be non-negative, got {true_time_ns}")
    drift = round(Fraction(clock.rate_ppb * true_time_ns, PPB))
    noise = 0
    if clock.noise_stddev_ns:
        if rng is None:
            raise ValidationError("a noisy clock needs a random stream")
        noise = round(clock.noise_stddev_ns * rng.standard_normal())
    return _checked(true_time_ns + clock.offset_ns + drift + noise)


@dataclass(frozen=True)
class Node:
    id: str
    clock: ClockModel = ClockModel()
    position: Optional[int] = None  # light-nanoseconds along a line


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    delay_ab_ns: int
    delay_ba_ns: int
    jitter_stddev_ns: int = 0

    def delay(self, src: str, dst: str) -> int:
        if (src, dst) == (self.a, self.b):
            return self.delay_ab_ns
        if (src, dst) == (self.b, self.a):
            return self.delay_ba_ns
        raise ValidationError(f"link {self.a}-{self.b} does not join {src}->{dst}")

    @property
    def round_trip_ns(self) -> int:
        return self.delay_ab_ns + self.delay_ba_ns


@dataclass(frozen=True)
class Message:
    """A single one-way message emitted at coordinate time ``at_ns``."""

    msg_id: str
    src: str
    dst: str
    at_ns: int


@dataclass(frozen=True)
class Tick:
    """A purely local event (no message)."""

    event_id: str
    node: str
    at_ns: int


@dataclass(frozen=True)
class SyncSession:
    """Repeated four-timestamp exchanges between a master and a slave.

    Exchange ``k`` starts at ``start_ns + k * interval_ns``; the slave answers
    ``residence_ns`` after it receives the request.
    """

    sync_id: str
    master: str
    slave: str
    start_ns: int = 0
    repetitions: int = 1
    interval_ns: int = 1_000_000
    residence_ns: int = 0

    def request_id(self, k: int) -> str:
        return f"{self.sync_id}#{k}.req"

    def reply_id(self, k: int) -> str:
        return f"{self.sync_id}#{k}.rep"


Traffic = Union[Message, Tick, SyncSession]


@dataclass(frozen=True)
class Scenario:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...] = ()
    traffic: tuple[Traffic, ...] = ()
    conventions: tuple = ()
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("nodes", "links", "traffic", "conventions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise ConfigError(f"unknown node {node_id!r}")

    def link_between(self, a: str, b: str) -> Link:
        for link in self.links:
            if {link.a, link.b} == {a, b}:
                return link
        raise ConfigError(f"no link between {a!r} and {b!r}")

    def with_traffic(self, traffic: Iterable[Traffic]) -> Scenario:
        return replace(self, traffic=tuple(traffic))

    @property
    def positioned(self) -> bool:
        return bool(self.nodes) and all(n.position is not None for n in self.nodes)

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate node ids in {ids}")
        known = set(ids)
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for eps in self.conventions:
            check_epsilon(eps)
        pairs = set()
        for link in self.links:
            for end in (link.a, link.b):
                if end not in known:
                    raise ValidationError(f"link references unknown node {end!r}")
            if link.a == link.b:
                raise ValidationError(f"link {link.a}-{link.b} joins a node to itself")
            pair = frozenset((link.a, link.b))
            if pair in pairs:
                raise ValidationError(f"duplicate link {link.a}-{link.b}")
            pairs.add(pair)
            if link.delay_ab_ns < 1 or link.delay_ba_ns < 1:
                raise ValidationError(f"link {link.a}-{link.b}: delays must be >= 1 ns")
            if link.jitter_stddev_ns < 0:
                raise ValidationError(f"link {link.a}-{link.b}: jitter must be non-negative")
            pa, pb = self.node(link.a).position, self.node(link.b).position
            if pa is not None and pb is not None:
                light = abs(pa - pb)
                if min(link.delay_ab_ns, link.delay_ba_ns) < light:
                    raise ValidationError(
                        f"link {link.a}-{link.b}: delay below light time {light} ns"
                    )
        seen_ids = set()

        def claim(ident: str) -> None:
            if ident in seen_ids:
                raise ValidationError(f"duplicate traffic id {ident!r}")
            seen_ids.add(ident)

        for item in self.traffic:
            if isinstance(item, Message):
                claim(item.msg_id)
                self._check_route(item.src, item.dst, known, pairs)
                if item.at_ns < 0:
                    raise ValidationError(f"message {item.msg_id}: negative emission time")
            elif isinstance(item, Tick):
                claim(item.event_id)
                if item.node not in known:
                    raise ValidationError(f"tick {item.event_id} references unknown node {item.node!r}")
                if item.at_ns < 0:
                    raise ValidationError(f"tick {item.event_id}: negative time")
            elif isinstance(item, SyncSession):
                if item.repetitions < 1:
                    raise ValidationError(f"sync {item.sync_id}: repetitions must be >= 1")
                if item.start_ns < 0 or item.interval_ns < 0 or item.residence_ns < 0:
                    raise ValidationError(f"sync {item.sync_id}: times must be non-negative")
                self._check_route(item.master, item.slave, known, pairs)
                for k in range(item.repetitions):
                    claim(item.request_id(k))
                    claim(item.reply_id(k))
            else:
                raise ValidationError(f"unknown traffic entry {item!r}")

    @staticmethod
    def _check_route(src: str, dst: str, known: set, pairs: set) -> None:
        for end in (src, dst):
            if end not in known:
                raise ValidationError(f"traffic references unknown node {end!r}")
        if frozenset((src, dst)) not in pairs:
            raise ValidationError(f"traffic {src}->{dst} has no link")


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    node: str
    true_time_ns: int
    displayed_ns: int
    msg_id: Optional[str] = None

    def sort_key(self) -> tuple:
        return (self.true_time_ns, self.node, self.msg_id or "", self.kind)

    def as_row(self) -> tuple:
        return (self.kind, self.node, self.msg_id or "", self.true_time_ns, self.displayed_ns)

    def as_dict(self) -> dict:
        return dict(zip(TRACE_CSV_HEADER, self.as_row()))


def run(scenario: Scenario) -> tuple[TraceEvent, ...]:
    """Simulate ``scenario`` and return its trace ordered by coordinate time.

    Ties at one coordinate time break on (node id, msg id, kind).
    """
    scenario.validate()
    nodes = {n.id: n for n in scenario.nodes}
    clock_streams = {n.id: CounterStream(scenario.seed, f"clock:{n.id}") for n in scenario.nodes}
    jitter_streams: dict[tuple[str, str], CounterStream] = {}
    sessions: dict[str, tuple[SyncSession, int]] = {}

    heap: list = []

    def schedule(t: int, node: str, msg_id: Optional[str], kind: str, payload=None) -> None:
        heapq.heappush(heap, ((_checked(t), node, msg_id or "", kind), msg_id, payload))

    def transit(src: str, dst: str) -> int:
        link = scenario.link_between(src, dst)
        delay = link.delay(src, dst)
        if link.jitter_stddev_ns:
            stream = jitter_streams.setdefault(
                (src, dst), CounterStream(scenario.seed, f"link:{src}->{dst}")
            )
            # zero-mean Gaussian truncated at 0 has the law of |z|
            delay += round(link.jitter_stddev_ns * abs(stream.standard_normal()))
        return delay

    for item in scenario.traffic:
        if isinstance(item, Message):
            schedule(item.at_ns, item.src, item.msg_id, SEND, item.dst)
        elif isinstance(item, Tick):
            schedule(item.at_ns, item.node, item.event_id, TICK)
        else:
            for k in range(item.repetitions):
                rid = item.request_id(k)
                sessions[rid] = (item, k)
                schedule(item.start_ns + k * item.interval_ns, item.master, rid, SEND, item.slave)

    trace: list[TraceEvent] = []
    while heap:
        (t, node, _, kind), msg_id, payload = heapq.heappop(heap)
        displayed = read_clock(nodes[node].clock, t, clock_streams[node])
        trace.append(TraceEvent(kind, node, t, displayed, msg_id))
        if kind == SEND:
            schedule(t + transit(node, payload), payload, msg_id, RECEIVE, node)
        elif kind == RECEIVE and msg_id in sessions:
            session, k = sessions[msg_id]
            schedule(t + session.residence_ns, node, session.reply_id(k), SEND, payload)
    return tuple(trace)


def trace_to_csv(trace: Sequence[TraceEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_CSV_HEADER)
    for event in trace:
        writer.writerow(event.as_row())
    return buf.getvalue()


def trace_to_json(trace: Sequence[TraceEvent]) -> str:
    return json.dumps([e.as_dict() for e in trace], indent=1) + "\n"


def trace_from_json(text: str) -> tuple[TraceEvent, ...]:
    return tuple(
        TraceEvent(d["kind"], d["node"], int(d["true_time_ns"]), int(d["displayed_ns"]), d["msg_id"] or None)
        for d in json.loads(text)
    )


def trace_from_csv(text: str) -> tuple[TraceEvent, ...]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != TRACE_CSV_HEADER:
        raise ValidationError(f"unexpected trace header {rows.fieldnames}")
    return tuple(
        TraceEvent(r["kind"], r["node"], int(r["true_time_ns"]), int(r["displayed_ns"]), r["msg_id"] or None)
        for r in rows
    )
