"""Logical clocks, happens-before, and the ordering audit.

The audit separates pairs of trace events by their spacetime interval
(computed from simulator ground truth) and asks, for each pair, whether the
timestamp order survives a change of synchronisation convention or of
inertial frame. Causally connectable pairs must never reorder; spacelike
pairs generally do.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .clocknet import RECEIVE, SEND, Scenario, TraceEvent
from .conventions import check_epsilon
from .errors import ConfigError, ValidationError
from .spacetime import IntervalClass, Ordering, _check_velocity, boost, classify_interval

DEFAULT_EPSILONS = tuple(Fraction(k, 20) for k in range(1, 20))  # 0.05 .. 0.95
DEFAULT_BOOSTS = (-0.9, -0.5, 0.0, 0.5, 0.9)


@dataclass(frozen=True)
class LamportClock:
    counter: int = 0

    def __post_init__(self) -> None:
        if self.counter < 0:
            raise ValidationError("Lamport counter must be non-negative")


def lamport_step(own: LamportClock, incoming: Optional[LamportClock] = None) -> LamportClock:
    if incoming is None:
        return LamportClock(own.counter + 1)
    return LamportClock(max(own.counter, incoming.counter) + 1)


class Causality(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    EQUAL = "equal"
    CONCURRENT = "concurrent"


@dataclass(frozen=True)
class VectorClock:
    components: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", dict(sorted(self.components.items())))
        if any(v < 0 for v in self.components.values()):
            raise ValidationError("vector clock components must be non-negative")

    def __getitem__(self, node: str) -> int:
        return self.components.get(node, 0)

    def __hash__(self) -> int:
        return hash(tuple(self.components.items()))

    def compare(self, other: VectorClock) -> Causality:
        keys = self.components.keys() | other.components.keys()
        le = all(self[k] <= other[k] for k in keys)
        ge = all(self[k] >= other[k] for k in keys)
        if le and ge:
            return Causality.EQUAL
        if le:
            return Causality.BEFORE
        if ge:
            return Causality.AFTER
        return Causality.CONCURRENT


def vector_step(own: VectorClock, self_id: str, incoming: Optional[VectorClock] = None) -> VectorClock:
    if self_id not in own.components:
        raise ValidationError(f"node {self_id!r} has no component in {own.components}")
    merged = dict(own.components)
    if incoming is not None:
        for k, v in incoming.components.items():
            merged[k] = max(merged.get(k, 0), v)
    merged[self_id] += 1
    return VectorClock(merged)


def compare(a: VectorClock, b: VectorClock) -> Causality:
    return a.compare(b)


def _send_index(trace: Sequence[TraceEvent]) -> dict[str, int]:
    sends: dict[str, int] = {}
    for i, e in enumerate(trace):
        if e.kind == SEND:
            sends[e.msg_id] = i
    return sends


def lamport_timestamps(trace: Sequence[TraceEvent]) -> list[int]:
    """Lamport counters for every event, replaying the trace in order."""
    sends = _send_index(trace)
    clocks: dict[str, LamportClock] = {}
    stamps: list[int] = []
    for e in trace:
        own = clocks.get(e.node, LamportClock())
        incoming = None
        if e.kind == RECEIVE:
            if e.msg_id not in sends:
                raise ValidationError(f"receive of unknown message {e.msg_id!r}")
            incoming = LamportClock(stamps[sends[e.msg_id]])
        clocks[e.node] = lamport_step(own, incoming)
        stamps.append(clocks[e.node].counter)
    return stamps


def vector_timestamps(trace: Sequence[TraceEvent]) -> list[VectorClock]:
    sends = _send_index(trace)
    nodes = sorted({e.node for e in trace})
    zero = {n: 0 for n in nodes}
    clocks: dict[str, VectorClock] = {}
    stamps: list[VectorClock] = []
    for e in trace:
        own = clocks.get(e.node, VectorClock(zero))
        incoming = None
        if e.kind == RECEIVE:
            if e.msg_id not in sends:
                raise ValidationError(f"receive of unknown message {e.msg_id!r}")
            incoming = stamps[sends[e.msg_id]]
        clocks[e.node] = vector_step(own, e.node, incoming)
        stamps.append(clocks[e.node])
    return stamps


@dataclass(frozen=True)
class HappensBeforeGraph:
    """Happens-before over trace indices.

    ``reach[i]`` is a bitmask of every event that ``i`` happens before.
    """

    events: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    reach: tuple[int, ...]

    @property
    def closure(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (i, j) for i in self.events for j in self.events if self.reach[i] >> j & 1
        )

    def precedes(self, a: int, b: int) -> bool:
        return bool(self.reach[a] >> b & 1)

    def concurrent(self, a: int, b: int) -> bool:
        return a != b and not self.precedes(a, b) and not self.precedes(b, a)

    @property
    def acyclic(self) -> bool:
        return not any(self.reach[i] >> i & 1 for i in self.events)


def happens_before(trace: Sequence[TraceEvent]) -> HappensBeforeGraph:
    n = len(trace)
    edges: list[tuple[int, int]] = []
    last: dict[str, int] = {}
    sends = _send_index(trace)
    for i, e in enumerate(trace):
        if e.node in last:
            edges.append((last[e.node], i))
        last[e.node] = i
        if e.kind == RECEIVE:
            if e.msg_id not in sends:
                raise ValidationError(f"unmatched receive {e.msg_id!r}")
            edges.append((sends[e.msg_id], i))

    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    order = [i for i in range(n) if indeg[i] == 0]
    for i in order:  # Kahn's algorithm; ``order`` grows while iterating
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                order.append(j)
    if len(order) != n:
        raise ValidationError("happens-before graph has a cycle")
    reach = [0] * n
    for i in reversed(order):
        mask = 0
        for j in succ[i]:
            mask |= (1 << j) | reach[j]
        reach[i] = mask
    return HappensBeforeGraph(tuple(range(n)), tuple(edges), tuple(reach))


def lamport_converse_counterexample(trace: Sequence[TraceEvent]) -> Optional[tuple[int, int]]:
    """A concurrent pair ``(a, b)`` with ``L(a) < L(b)``, if the trace has one."""
    graph = happens_before(trace)
    stamps = lamport_timestamps(trace)
    for a in range(len(trace)):
        for b in range(len(trace)):
            if stamps[a] < stamps[b] and graph.concurrent(a, b):
                return (a, b)
    return None


# -- ordering audit --------------------------------------------------------


def convention_label(value, kind: str) -> str:
    if kind == "eps":
        return f"eps={float(value):g}"
    return f"v={float(value):g}"


def convention_time(true_time_ns: int, position: int, reference: int, eps) -> Fraction:
    """Coordinate time re-expressed under Reichenbach synchrony ``eps``.

    Shifts a clock at ``position`` by ``(eps - 1/2)`` times its light round
    trip to the reference, signed by direction: ``t + (2 eps - 1)(x - x_ref)``.
    """
    return true_time_ns + (2 * Fraction(eps) - 1) * (position - reference)


def _order(dt) -> Ordering:
    if abs(dt) < 1e-12:
        return Ordering.SIMULTANEOUS
    return Ordering.BEFORE if dt > 0 else Ordering.AFTER


@dataclass
class FitoAuditReport:
    spacelike_pairs: int
    timelike_pairs: int
    lightlike_pairs: int
    flipped_pairs: int
    timelike_violations: int
    acyclic: bool
    conventions: list[str]
    pairs: list[dict]

    def as_dict(self) -> dict:
        return {
            "spacelike_pairs": self.spacelike_pairs,
            "timelike_pairs": self.timelike_pairs,
            "lightlike_pairs": self.lightlike_pairs,
            "flipped_pairs": self.flipped_pairs,
            "timelike_violations": self.timelike_violations,
            "happens_before_acyclic": self.acyclic,
            "conventions": self.conventions,
            "pairs": self.pairs,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1) + "\n"


def _positions(source) -> dict[str, int]:
    if isinstance(source, Scenario):
        if not source.positioned:
            raise ConfigError("ordering audit needs a position on every node")
        return {n.id: n.position for n in source.nodes}
    return dict(source)


def fito_audit(
    trace: Sequence[TraceEvent],
    positions,
    conventions: Sequence = DEFAULT_EPSILONS,
    boosts: Sequence[float] = DEFAULT_BOOSTS,
    reference: Optional[str] = None,
) -> FitoAuditReport:
    """Count cross-node event pairs whose order depends on convention or frame.

    ``positions`` maps node id to light-ns position (a positioned
    :class:`Scenario` also works). A pair is *flipped* when some convention
    orders it one way and another the opposite way; a *timelike violation* is
    a timelike or lightlike pair ordered against its coordinate-time order.
    """
    pos = _positions(positions)
    if not conventions:
        raise ValidationError("at least one convention is required")
    for eps in conventions:
        check_epsilon(eps)
    for v in boosts:
        _check_velocity(v)
    missing = {e.node for e in trace} - pos.keys()
    if missing:
        raise ConfigError(f"no position for nodes {sorted(missing)}")
    ref = pos[reference] if reference is not None else (next(iter(pos.values())) if pos else 0)

    labels = [convention_label(e, "eps") for e in conventions] + [
        convention_label(v, "v") for v in boosts
    ]
    counts = {c: 0 for c in IntervalClass}
    flipped = violations = 0
    table: list[dict] = []
    for i in range(len(trace)):
        ei = trace[i]
        xi = pos[ei.node]
        for j in range(i + 1, len(trace)):
            ej = trace[j]
            if ej.node == ei.node:
                continue
            xj = pos[ej.node]
            dt, dx = ej.true_time_ns - ei.true_time_ns, xj - xi
            cls = classify_interval((dt, dx))
            counts[cls] += 1
            orders = [
                _order(convention_time(ej.true_time_ns, xj, ref, eps) - convention_time(ei.true_time_ns, xi, ref, eps))
                for eps in conventions
            ]
            orders += [_order(boost((dt, dx), v)[0]) for v in boosts]
            seen = set(orders)
            is_flip = Ordering.BEFORE in seen and Ordering.AFTER in seen
            if cls is IntervalClass.SPACELIKE:
                flipped += is_flip
            else:
                truth = _order(dt)
                if truth is not Ordering.SIMULTANEOUS and any(o is not truth for o in orders):
                    violations += 1
            table.append(
                {
                    "pair": f"{i}-{j}",
                    "class": cls.value,
                    "orders": dict(zip(labels, (o.value for o in orders))),
                }
            )
    return FitoAuditReport(
        spacelike_pairs=counts[IntervalClass.SPACELIKE],
        timelike_pairs=counts[IntervalClass.TIMELIKE],
        lightlike_pairs=counts[IntervalClass.LIGHTLIKE],
        flipped_pairs=flipped,
        timelike_violations=violations,
        acyclic=happens_before(trace).acyclic,
        conventions=labels,
        pairs=table,
    )
