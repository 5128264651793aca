"""Civil time scales: TAI, UTC with leap seconds, UT1, leap smearing and DST.

TAI instants are integer nanoseconds since 1970-01-01T00:00:00 on the TAI
scale. UTC is rendered as calendar labels; during an inserted leap second the
label reads 23:59:60.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, NonexistentTimeError, UncoveredEpochError, ValidationError

NS = 10**9
SECONDS_PER_DAY = 86_400
_EPOCH_ORDINAL = dt.date(1970, 1, 1).toordinal()
LEAP_CONSTRAINT_S = 0.9


@dataclass(frozen=True, order=True)
class TaiInstant:
    ns_since_epoch: int

    def __post_init__(self) -> None:
        if not isinstance(self.ns_since_epoch, int):
            raise ValidationError("TAI instants are integer nanoseconds")

    def __add__(self, ns: int) -> TaiInstant:
        return TaiInstant(self.ns_since_epoch + ns)

    def label(self) -> CivilTime:
        """Calendar label on the TAI scale itself (no leap seconds, ever)."""
        return CivilTime.from_naive_ns(self.ns_since_epoch)

    @classmethod
    def from_label(cls, label: CivilTime) -> TaiInstant:
        if label.second == 60:
            raise ValidationError("TAI has no 60th second")
        return cls(label.to_naive_ns())


_ISO = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,9}))?(Z| ?UTC| ?TAI)?$"
)


@dataclass(frozen=True, order=True)
class CivilTime:
    """A calendar label. ``second == 60`` is allowed only for 23:59:60.

    Whether a particular 23:59:60 exists is a property of a leap table and is
    checked at conversion time.
    """

    year: int
    month: int
    day: int
    hour: int = 0
    minute: int = 0
    second: int = 0
    nanosecond: int = 0

    def __post_init__(self) -> None:
        try:
            dt.date(self.year, self.month, self.day)
        except ValueError as exc:
            raise ValidationError(f"invalid calendar date: {exc}") from None
        if not (0 <= self.hour < 24 and 0 <= self.minute < 60 and 0 <= self.second <= 60):
            raise ValidationError(f"invalid time of day {self.hour}:{self.minute}:{self.second}")
        if self.second == 60 and (self.hour, self.minute) != (23, 59):
            raise ValidationError("second=60 only exists as 23:59:60")
        if not 0 <= self.nanosecond < NS:
            raise ValidationError(f"nanosecond out of range: {self.nanosecond}")

    @property
    def date(self) -> dt.date:
        return dt.date(self.year, self.month, self.day)

    def to_naive_ns(self) -> int:
        """Nanoseconds since 1970-01-01 counting every day as 86,400 s.

        23:59:60 maps onto the following midnight.
        """
        days = self.date.toordinal() - _EPOCH_ORDINAL
        secs = days * SECONDS_PER_DAY + self.hour * 3600 + self.minute * 60 + self.second
        return secs * NS + self.nanosecond

    @classmethod
    def from_naive_ns(cls, ns: int) -> CivilTime:
        secs, frac = divmod(ns, NS)
        days, sod = divmod(secs, SECONDS_PER_DAY)
        d = dt.date.fromordinal(days + _EPOCH_ORDINAL)
        return cls(d.year, d.month, d.day, sod // 3600, sod // 60 % 60, sod % 60, frac)

    @classmethod
    def parse(cls, text: str) -> CivilTime:
        m = _ISO.match(text.strip())
        if not m:
            raise ValidationError(f"unparseable time {text!r}; expected YYYY-MM-DDTHH:MM:SS[.fffffffff]")
        y, mo, d, h, mi, s, frac, _ = m.groups()
        ns = int((frac or "0").ljust(9, "0"))
        return cls(int(y), int(mo), int(d), int(h), int(mi), int(s), ns)

    def isoformat(self, suffix: str = "") -> str:
        text = (
            f"{self.year:04d}-{self.month:02d}-{self.day:02d}"
            f"T{self.hour:02d}:{self.minute:02d}:{self.second:02d}"
        )
        if self.nanosecond:
            text += f".{self.nanosecond:09d}"
        return text + suffix

    def __str__(self) -> str:
        return self.isoformat()


UtcCivil = CivilTime


# -- leap tables -----------------------------------------------------------


@dataclass(frozen=True)
class LeapTable:
    """Rows of (first UTC day, TAI - UTC in whole seconds from that day on)."""

    entries: tuple[tuple[dt.date, int], ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("leap table is empty")
        for (d0, o0), (d1, o1) in zip(entries, entries[1:]):
            if d1 <= d0:
                raise ValidationError(f"leap table dates not strictly increasing at {d1}")
            if abs(o1 - o0) != 1:
                raise ValidationError(f"leap table step at {d1} is {o1 - o0}, expected +-1")

    @property
    def steps(self) -> list[int]:
        return [o1 - o0 for (_, o0), (_, o1) in zip(self.entries, self.entries[1:])]

    def _index_for_date(self, day: dt.date) -> int:
        idx = -1
        for i, (d, _) in enumerate(self.entries):
            if d <= day:
                idx = i
            else:
                break
        if idx < 0:
            raise UncoveredEpochError(f"{day} precedes the leap table start {self.entries[0][0]}")
        return idx

    def offset_for_date(self, day: dt.date) -> int:
        return self.entries[self._index_for_date(day)][1]

    def tai_start_ns(self, i: int) -> int:
        """TAI instant at which entry ``i`` takes effect."""
        d, off = self.entries[i]
        return ((d.toordinal() - _EPOCH_ORDINAL) * SECONDS_PER_DAY + off) * NS


def parse_leap_table(text: str) -> LeapTable:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and not r[0].startswith("#")]
    if not rows or [c.strip() for c in rows[0]] != ["date", "offset_s"]:
        raise ValidationError("leap table must start with the header 'date,offset_s'")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ValidationError(f"leap table line {lineno}: expected 2 columns")
        try:
            entries.append((dt.date.fromisoformat(row[0].strip()), int(row[1])))
        except ValueError as exc:
            raise ValidationError(f"leap table line {lineno}: {exc}") from None
    return LeapTable(tuple(entries))


def load_leap_table(path: Union[str, Path, None] = None) -> LeapTable:
    """Read a leap table CSV; with no path, the bundled historical table."""
    if path is None:
        return bundled_leap_table("leap_seconds.csv")
    return parse_leap_table(Path(path).read_text())


def bundled_leap_table(name: str) -> LeapTable:
    return parse_leap_table(resources.files("simultaneity.data").joinpath(name).read_text())


# -- TAI <-> UTC -----------------------------------------------------------


def utc_to_tai(label: CivilTime, table: LeapTable) -> TaiInstant:
    i = table._index_for_date(label.date)
    nxt = table.entries[i + 1] if i + 1 < len(table.entries) else None
    tomorrow = label.date + dt.timedelta(days=1)
    step = nxt[1] - table.entries[i][1] if nxt and nxt[0] == tomorrow else 0
    if label.second == 60 and step != 1:
        raise ValidationError(f"{label} is not an inserted leap second in this table")
    if step == -1 and (label.hour, label.minute, label.second) == (23, 59, 59):
        raise ValidationError(f"{label} was removed by a negative leap second")
    return TaiInstant(label.to_naive_ns() + table.entries[i][1] * NS)


def tai_to_utc(t: TaiInstant, table: LeapTable) -> CivilTime:
    ns = t.ns_since_epoch
    k = -1
    for i in range(len(table.entries)):
        if table.tai_start_ns(i) <= ns:
            k = i
        else:
            break
    if k < 0:
        raise UncoveredEpochError(f"TAI instant {t.label()} precedes the leap table")
    if k + 1 < len(table.entries):
        nxt_start = table.tai_start_ns(k + 1)
        if table.entries[k + 1][1] - table.entries[k][1] == 1 and ns >= nxt_start - NS:
            day = table.entries[k + 1][0] - dt.timedelta(days=1)
            return CivilTime(day.year, day.month, day.day, 23, 59, 60, ns - (nxt_start - NS))
    return CivilTime.from_naive_ns(ns - table.entries[k][1] * NS)


def tai_minus_utc(t: TaiInstant, table: LeapTable) -> int:
    """TAI - UTC in whole seconds at ``t`` (the old value during a leap second)."""
    label = tai_to_utc(t, table)
    return table.offset_for_date(label.date)


# -- UT1 -------------------------------------------------------------------


@dataclass(frozen=True)
class Ut1Model:
    """Piecewise-linear UT1 - UTC in seconds, given at knot labels."""

    knots: tuple[tuple[CivilTime, float], ...]

    def __post_init__(self) -> None:
        knots = tuple(self.knots)
        object.__setattr__(self, "knots", knots)
        if not knots:
            raise ValidationError("UT1 model needs at least one knot")
        xs = [k.to_naive_ns() for k, _ in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("UT1 knots must be strictly increasing")
        if not all(math.isfinite(v) for _, v in knots):
            raise ValidationError("UT1 offsets must be finite")

    def ut1_minus_utc(self, at: CivilTime) -> float:
        x = at.to_naive_ns()
        xs = [k.to_naive_ns() for k, _ in self.knots]
        if not xs[0] <= x <= xs[-1]:
            raise ValidationError(f"{at} outside the UT1 model range")
        return float(np.interp(x, xs, [v for _, v in self.knots]))

    def utc_minus_ut1(self, at: CivilTime) -> float:
        return -self.ut1_minus_utc(at)


def check_leap_constraint(utc_minus_ut1_s: float) -> bool:
    """True while |UTC - UT1| stays strictly below 0.9 s."""
    if not math.isfinite(utc_minus_ut1_s):
        raise ValidationError(f"non-finite UTC-UT1 value {utc_minus_ut1_s!r}")
    return abs(utc_minus_ut1_s) < LEAP_CONSTRAINT_S


# -- leap smear ------------------------------------------------------------


@dataclass(frozen=True)
class LeapEvent:
    """A leap second: from TAI instant ``tai_ns`` on, TAI-UTC is ``offset_before_s + sign``."""

    tai_ns: int
    sign: int
    offset_before_s: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValidationError("leap sign must be +1 or -1")


def leap_events(table: LeapTable) -> list[LeapEvent]:
    return [
        LeapEvent(table.tai_start_ns(i), table.entries[i][1] - table.entries[i - 1][1], table.entries[i - 1][1])
        for i in range(1, len(table.entries))
    ]


SMEAR_PLACEMENTS = ("end", "center")


def smear_window(leap: LeapEvent, window_s: int = SECONDS_PER_DAY, placement: str = "end") -> tuple[int, int]:
    """TAI bounds ``[start, end]`` of the smear window in ns."""
    if window_s <= 0:
        raise DomainError(f"smear window must be positive, got {window_s}")
    width = int(window_s * NS)
    if placement == "end":
        return leap.tai_ns - width, leap.tai_ns
    if placement == "center":
        return leap.tai_ns - width // 2, leap.tai_ns - width // 2 + width
    raise ValidationError(f"unknown smear placement {placement!r}; choose from {SMEAR_PLACEMENTS}")


def _round_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2):
        q += 1
    return q


def unsmeared(t: TaiInstant, leap: LeapEvent) -> int:
    """Leap-free UTC count (ns since 1970) stepping by the leap at ``leap.tai_ns``."""
    off = leap.offset_before_s + (leap.sign if t.ns_since_epoch >= leap.tai_ns else 0)
    return t.ns_since_epoch - off * NS


def smear(t: TaiInstant, leap: LeapEvent, window_s: int = SECONDS_PER_DAY, placement: str = "end") -> int:
    """Smeared UTC count in ns since 1970: linear rate change across the window.

    Outside the window this equals :func:`unsmeared`; inside, the leap is
    absorbed linearly so the output is continuous and strictly increasing.
    """
    start, end = smear_window(leap, window_s, placement)
    ns = t.ns_since_epoch
    if ns <= start:
        adj = 0
    elif ns >= end:
        adj = leap.sign * NS
    else:
        adj = _round_div(leap.sign * NS * (ns - start), end - start)
    return ns - leap.offset_before_s * NS - adj


def smear_rate_ppb(window_s: int = SECONDS_PER_DAY) -> float:
    """Magnitude of the smeared clock's rate deviation, parts per billion."""
    if window_s <= 0:
        raise DomainError(f"smear window must be positive, got {window_s}")
    return NS / window_s


# -- daylight saving -------------------------------------------------------


@dataclass(frozen=True)
class DstRule:
    """One DST period. ``start``/``end`` are local *standard*-time labels.

    DST is in effect iff standard local time lies in ``[start, end)``; when
    ``start > end`` the period wraps (southern-hemisphere style).
    """

    start: CivilTime
    end: CivilTime
    base_offset_s: int = 0
    dst_offset_s: int = 3600

    def __post_init__(self) -> None:
        if self.start == self.end:
            raise ValidationError("DST start and end must differ")
        if self.dst_offset_s <= 0:
            raise ValidationError("dst_offset_s must be positive")

    def in_effect(self, standard: CivilTime) -> bool:
        s, a, b = standard.to_naive_ns(), self.start.to_naive_ns(), self.end.to_naive_ns()
        if a < b:
            return a <= s < b
        return not b <= s < a


@dataclass(frozen=True)
class LocalTime:
    label: CivilTime
    dst: bool
    utc_offset_s: int


def _shift(label: CivilTime, seconds: int) -> CivilTime:
    if label.second == 60:
        if seconds % SECONDS_PER_DAY:
            raise ValidationError(f"leap second {label} has no local rendering at offset {seconds} s")
        moved = CivilTime.from_naive_ns(replace(label, second=59).to_naive_ns() + seconds * NS)
        return replace(moved, second=60)
    return CivilTime.from_naive_ns(label.to_naive_ns() + seconds * NS)


def apply_dst(t: CivilTime, rule: DstRule) -> LocalTime:
    """Render UTC label ``t`` as local wall time, adding the DST offset when in effect."""
    standard = _shift(t, rule.base_offset_s)
    if rule.in_effect(standard):
        return LocalTime(_shift(standard, rule.dst_offset_s), True, rule.base_offset_s + rule.dst_offset_s)
    return LocalTime(standard, False, rule.base_offset_s)


@dataclass(frozen=True)
class LocalResolution:
    """UTC readings of a wall-clock label; two candidates when ambiguous."""

    candidates: tuple[CivilTime, ...]

    @property
    def ambiguous(self) -> bool:
        return len(self.candidates) > 1


def local_to_utc(wall: CivilTime, rule: DstRule) -> LocalResolution:
    """Invert :func:`apply_dst`; raises in the spring-forward gap."""
    out = []
    if not rule.in_effect(wall):
        out.append(_shift(wall, -rule.base_offset_s))
    as_dst = _shift(wall, -rule.dst_offset_s)
    if rule.in_effect(as_dst):
        out.append(_shift(as_dst, -rule.base_offset_s))
    if not out:
        raise NonexistentTimeError(f"local time {wall} falls in the spring-forward gap")
    return LocalResolution(tuple(sorted(out)))


def render_utc(t: TaiInstant, table: LeapTable) -> str:
    return tai_to_utc(t, table).isoformat("Z")
