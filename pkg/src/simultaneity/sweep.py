"""Sweep synchronisation conventions over one simulated trace.

For each convention the responder's clock in every request/reply exchange is
re-synchronised by Reichenbach's rule, i.e. its timeline is shifted by
``(eps - 1/2) * RTT`` with RTT the link's nominal round trip. One-clock
observables (RTT, delay variation) must come out identical for every
convention; one-way delays move linearly with ``eps``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Optional, Sequence

from .causal import convention_time
from .clocknet import Scenario, TraceEvent, run
from .conventions import check_epsilon, kappa_to_epsilon
from .metrics import one_way_delay, request_reply_pairs, rtt, samples_from_trace
from .spacetime import IntervalClass, Ordering, _check_velocity, boost, classify_interval

SWEEP_CSV_HEADER = (
    "convention", "epsilon", "kappa", "exchange", "rtt_ns",
    "owd_forward_ns", "owd_reverse_ns", "pdv_forward_ns", "flipped_spacelike_pairs",
)


def exact(value) -> str:
    """Render an exact rational as a decimal when it terminates, else ``p/q``."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{value.numerator}/{value.denominator}"
    return format(Decimal(value.numerator) / Decimal(value.denominator), "f")


@dataclass(frozen=True)
class Convention:
    label: str
    epsilon: Optional[Fraction] = None
    kappa: Optional[Fraction] = None
    velocity: Optional[float] = None


def build_conventions(epsilons: Sequence = (), kappas: Sequence = (), boosts: Sequence = ()) -> list[Convention]:
    out = []
    for eps in epsilons:
        eps = Fraction(eps)
        check_epsilon(eps)
        out.append(Convention(f"eps={exact(eps)}", epsilon=eps))
    for kappa in kappas:
        kappa = Fraction(kappa)
        out.append(Convention(f"kappa={exact(kappa)}", epsilon=kappa_to_epsilon(kappa), kappa=kappa))
    for v in boosts:
        _check_velocity(float(v))
        out.append(Convention(f"v={float(v):g}", velocity=float(v)))
    return out


def _cross_pairs(trace: Sequence[TraceEvent], positions: dict) -> tuple[int, list]:
    """Number of cross-node pairs, and the spacelike ones."""
    pairs, cross = [], 0
    for i, a in enumerate(trace):
        for b in trace[i + 1:]:
            if a.node != b.node:
                cross += 1
                d = (b.true_time_ns - a.true_time_ns, positions[b.node] - positions[a.node])
                if classify_interval(d) is IntervalClass.SPACELIKE:
                    pairs.append((a, b))
    return cross, pairs


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def flipped_against_rest(pairs, positions: dict, reference: int, conv: Convention) -> int:
    """Spacelike pairs ordered opposite to their order in the simulator frame."""
    count = 0
    for a, b in pairs:
        rest = _sign(b.true_time_ns - a.true_time_ns)
        if conv.velocity is not None:
            dt = boost((b.true_time_ns - a.true_time_ns, positions[b.node] - positions[a.node]), conv.velocity)[0]
            other = 0 if abs(dt) < 1e-12 else _sign(dt)
        else:
            other = _sign(
                convention_time(b.true_time_ns, positions[b.node], reference, conv.epsilon)
                - convention_time(a.true_time_ns, positions[a.node], reference, conv.epsilon)
            )
        count += rest * other < 0
    return count


@dataclass
class SweepResult:
    rows: list[dict]
    summary: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_CSV_HEADER)
        for row in self.rows:
            writer.writerow([exact(row[k]) if k not in ("convention", "exchange") else row[k] for k in SWEEP_CSV_HEADER])
        return buf.getvalue()


def convention_sweep(
    scenario: Scenario,
    conventions: Sequence[Convention],
    trace: Optional[Sequence[TraceEvent]] = None,
) -> SweepResult:
    if trace is None:
        trace = run(scenario)
    exchanges = request_reply_pairs(samples_from_trace(trace))
    positions = {n.id: n.position for n in scenario.nodes} if scenario.positioned else None
    cross, spacelike = _cross_pairs(trace, positions) if positions else (0, [])
    reference = scenario.nodes[0].position if positions else 0

    rows: list[dict] = []
    for conv in conventions:
        flips = flipped_against_rest(spacelike, positions, reference, conv) if cross else None
        previous: dict[tuple[str, str], Fraction] = {}
        if not exchanges:
            rows.append(_row(conv, None, None, None, None, None, flips))
        for req, rep in exchanges:
            round_trip = rtt(req, rep)
            if conv.epsilon is None:
                rows.append(_row(conv, req.msg_id, round_trip, None, None, None, flips))
                continue
            nominal = scenario.link_between(req.src, req.dst).round_trip_ns
            shift = (conv.epsilon - Fraction(1, 2)) * nominal
            fwd = one_way_delay(req) + shift
            rev = one_way_delay(rep) - shift
            path = (req.src, req.dst)
            pdv = abs(fwd - previous[path]) if path in previous else None
            previous[path] = fwd
            row = _row(conv, req.msg_id, round_trip, fwd, rev, pdv, flips)
            row["_residence"] = rep.send_displayed_ns - req.recv_displayed_ns
            rows.append(row)
    return SweepResult(rows, _summarise(rows, scenario))


def _row(conv, exchange, rtt_ns, fwd, rev, pdv, flips) -> dict:
    return {
        "convention": conv.label,
        "epsilon": conv.epsilon,
        "kappa": conv.kappa,
        "exchange": exchange or "",
        "rtt_ns": rtt_ns,
        "owd_forward_ns": fwd,
        "owd_reverse_ns": rev,
        "pdv_forward_ns": pdv,
        "flipped_spacelike_pairs": flips,
        "_velocity": conv.velocity,
    }


def _summarise(rows: list[dict], scenario: Scenario) -> dict:
    by_exchange: dict[str, list[dict]] = {}
    for row in rows:
        if row["exchange"]:
            by_exchange.setdefault(row["exchange"], []).append(row)
    rtt_ok = pdv_ok = linear_ok = sum_ok = True
    for group in by_exchange.values():
        rtt_ok &= len({r["rtt_ns"] for r in group}) == 1
        eps_rows = sorted((r for r in group if r["epsilon"] is not None), key=lambda r: r["epsilon"])
        pdv_ok &= len({r["pdv_forward_ns"] for r in eps_rows}) <= 1
        for r in eps_rows:
            sum_ok &= r["owd_forward_ns"] + r["owd_reverse_ns"] == r["rtt_ns"] - r["_residence"]
        distinct = {r["epsilon"]: r for r in eps_rows}
        if len(distinct) >= 2:
            lo, hi = distinct[min(distinct)], distinct[max(distinct)]
            slope = (hi["owd_forward_ns"] - lo["owd_forward_ns"]) / (hi["epsilon"] - lo["epsilon"])
            for r in eps_rows:
                linear_ok &= r["owd_forward_ns"] == lo["owd_forward_ns"] + slope * (r["epsilon"] - lo["epsilon"])
    return {
        "rows": len(rows),
        "exchanges": len(by_exchange),
        "rtt_constant": rtt_ok,
        "pdv_constant": pdv_ok,
        "owd_linear_in_epsilon": linear_ok,
        "owd_sum_equals_rtt": sum_ok,
        "single_clock_observables_invariant": rtt_ok and pdv_ok,
    }
