import datetime as dt
import random

import pytest
from hypothesis import given, strategies as st

from simultaneity import civiltime as ct
from simultaneity.civiltime import CivilTime, DstRule, LeapEvent, TaiInstant
from simultaneity.errors import (
    DomainError,
    NonexistentTimeError,
    UncoveredEpochError,
    ValidationError,
)

NS = 10**9
ONE_LEAP = ct.bundled_leap_table("synthetic_one_leap.csv")
NEG_LEAP = ct.bundled_leap_table("synthetic_negative_leap.csv")
NO_LEAP = ct.bundled_leap_table("synthetic_no_leap.csv")
HISTORY = ct.load_leap_table()


def utc(text):
    return CivilTime.parse(text)


# -- labels ----------------------------------------------------------------


def test_civil_parse_and_format():
    c = utc("2000-06-30T23:59:60.25")
    assert (c.second, c.nanosecond) == (60, 250_000_000)
    assert c.isoformat("Z").startswith("2000-06-30T23:59:60.25")
    with pytest.raises(ValidationError):
        utc("2000-02-30T00:00:00")
    with pytest.raises(ValidationError):
        utc("2000-06-30T23:58:60")  # :60 only in the last minute of a day


def test_tai_epoch_label():
    assert TaiInstant(0).label() == utc("1970-01-01T00:00:00")
    assert TaiInstant.from_label(utc("1970-01-02T00:00:00")).ns_since_epoch == 86_400 * NS


# -- TAI <-> UTC -----------------------------------------------------------


def test_synthetic_leap_renders_60():
    # Table: 10 s from 2000-01-01, 11 s from 2000-07-01.  The leap second is the
    # TAI second starting at midnight 2000-07-01 UTC + 11 s - 1 s.
    rollover = ONE_LEAP.tai_start_ns(1)
    inside = TaiInstant(rollover - NS)
    assert ct.render_utc(inside, ONE_LEAP) == "2000-06-30T23:59:60Z"
    assert ct.tai_to_utc(TaiInstant(rollover - 2 * NS), ONE_LEAP) == utc("2000-06-30T23:59:59")
    assert ct.tai_to_utc(TaiInstant(rollover), ONE_LEAP) == utc("2000-07-01T00:00:00")
    assert ct.tai_to_utc(TaiInstant(rollover - 1), ONE_LEAP) == utc("2000-06-30T23:59:60.999999999")
    # by hand: 2000-07-01 is day 11139 after 1970-01-01
    assert rollover == (11_139 * 86_400 + 11) * NS


def test_leap_second_label_validation():
    assert ct.utc_to_tai(utc("2000-06-30T23:59:60"), ONE_LEAP).ns_since_epoch == ONE_LEAP.tai_start_ns(1) - NS
    with pytest.raises(ValidationError):
        ct.utc_to_tai(utc("2000-03-31T23:59:60"), ONE_LEAP)


def test_zero_leap_constant_offset():
    offset = NO_LEAP.entries[0][1]
    for text in ("2000-01-01T00:00:00", "2003-05-06T07:08:09.5", "2010-12-31T23:59:59"):
        label = utc(text)
        assert ct.utc_to_tai(label, NO_LEAP).ns_since_epoch - label.to_naive_ns() == offset * NS


def test_uncovered_epoch():
    with pytest.raises(UncoveredEpochError):
        ct.tai_to_utc(TaiInstant(0), ONE_LEAP)
    with pytest.raises(UncoveredEpochError):
        ct.utc_to_tai(utc("1999-12-31T23:59:59"), ONE_LEAP)


def test_round_trip_10000():
    r = random.Random(7)
    for table in (ONE_LEAP, NEG_LEAP, HISTORY):
        lo = table.tai_start_ns(0)
        span = 40 * 365 * 86_400 * NS if table is HISTORY else 400 * 86_400 * NS
        for _ in range(10_000 if table is HISTORY else 2_000):
            t = TaiInstant(lo + r.randrange(span))
            assert ct.utc_to_tai(ct.tai_to_utc(t, table), table) == t


def test_round_trip_dense_near_leap():
    rollover = ONE_LEAP.tai_start_ns(1)
    for delta in range(-3 * NS, 3 * NS, NS // 4):
        t = TaiInstant(rollover + delta)
        assert ct.utc_to_tai(ct.tai_to_utc(t, ONE_LEAP), ONE_LEAP) == t


def test_negative_leap_skips_59():
    rollover = NEG_LEAP.tai_start_ns(1)
    assert ct.tai_to_utc(TaiInstant(rollover - 1), NEG_LEAP) == utc("2000-06-30T23:59:58.999999999")
    assert ct.tai_to_utc(TaiInstant(rollover), NEG_LEAP) == utc("2000-07-01T00:00:00")
    with pytest.raises(ValidationError):
        ct.utc_to_tai(utc("2000-06-30T23:59:59"), NEG_LEAP)


def test_historical_table_27_positive_steps():
    assert HISTORY.entries[0] == (dt.date(1972, 1, 1), 10)
    assert HISTORY.entries[-1] == (dt.date(2017, 1, 1), 37)
    assert len(HISTORY.steps) == 27 and all(s == 1 for s in HISTORY.steps)


def test_tai_minus_utc_history():
    assert ct.tai_minus_utc(ct.utc_to_tai(utc("2020-01-01T00:00:00"), HISTORY), HISTORY) == 37
    assert ct.tai_minus_utc(ct.utc_to_tai(utc("2016-12-31T23:59:60"), HISTORY), HISTORY) == 36


def test_bad_tables():
    with pytest.raises(ValidationError):
        ct.parse_leap_table("when,offset\n2000-01-01,10\n")
    with pytest.raises(ValidationError):
        ct.parse_leap_table("date,offset_s\n2000-01-01,10\n2000-07-01,12\n")
    with pytest.raises(ValidationError):
        ct.parse_leap_table("date,offset_s\n2000-07-01,10\n2000-01-01,11\n")


# -- UT1 and the 0.9 s constraint -------------------------------------------


@pytest.mark.parametrize("x,ok", [(0.0, True), (0.9, False), (-0.85, True), (-0.9, False), (0.8999, True)])
def test_leap_constraint(x, ok):
    assert ct.check_leap_constraint(x) is ok


def test_leap_constraint_rejects_nan():
    with pytest.raises(ValidationError):
        ct.check_leap_constraint(float("nan"))


def test_ut1_model_interpolates():
    m = ct.Ut1Model(((utc("2016-01-01T00:00:00"), 0.0), (utc("2016-01-03T00:00:00"), -0.4)))
    assert m.ut1_minus_utc(utc("2016-01-02T00:00:00")) == pytest.approx(-0.2)
    assert ct.check_leap_constraint(m.utc_minus_ut1(utc("2016-01-02T00:00:00")))
    with pytest.raises(ValidationError):
        m.ut1_minus_utc(utc("2017-01-01T00:00:00"))


# -- smear -----------------------------------------------------------------

LEAP = ct.leap_events(ONE_LEAP)[0]
DAY = 86_400 * NS


def test_leap_events_from_table():
    assert LEAP == LeapEvent(ONE_LEAP.tai_start_ns(1), 1, 10)
    assert [e.sign for e in ct.leap_events(NEG_LEAP)] == [-1]


def test_smear_boundaries():
    start, end = ct.smear_window(LEAP)
    assert end - start == DAY and end == LEAP.tai_ns
    for t in (start - NS, start, end, end + NS):
        assert ct.smear(TaiInstant(t), LEAP) == ct.unsmeared(TaiInstant(t), LEAP)


def test_smear_midpoint_half_second():
    start, end = ct.smear_window(LEAP)
    mid = TaiInstant((start + end) // 2)
    assert ct.smear(mid, LEAP) == ct.unsmeared(mid, LEAP) - 500_000_000


def test_smear_conservation():
    for leap in (LEAP, ct.leap_events(NEG_LEAP)[0]):
        start, end = ct.smear_window(leap)
        total = (ct.smear(TaiInstant(end), leap) - ct.smear(TaiInstant(start), leap)) - (end - start)
        assert total == -leap.sign * NS


@given(st.integers(min_value=-10, max_value=DAY + 10), st.sampled_from(["end", "center"]), st.sampled_from([1, -1]))
def test_smear_continuity(k, placement, sign):
    leap = LeapEvent(LEAP.tai_ns, sign, 10)
    start, _ = ct.smear_window(leap, placement=placement)
    a = ct.smear(TaiInstant(start + k), leap, placement=placement)
    b = ct.smear(TaiInstant(start + k + 1), leap, placement=placement)
    assert b - a in (0, 1, 2)


def test_smear_rate():
    assert abs(ct.smear_rate_ppb() - 11_574) <= 1
    start, end = ct.smear_window(LEAP)
    step = 3_600 * NS
    for t in range(start, end, step):
        dsmear = ct.smear(TaiInstant(t + step), LEAP) - ct.smear(TaiInstant(t), LEAP)
        assert abs((step - dsmear) / step * 1e9 - 11_574.07) < 0.01


def test_smear_center_window():
    start, end = ct.smear_window(LEAP, placement="center")
    assert start == LEAP.tai_ns - DAY // 2 and end == LEAP.tai_ns + DAY // 2


def test_smear_errors():
    with pytest.raises(DomainError):
        ct.smear(TaiInstant(0), LEAP, window_s=0)
    with pytest.raises(ValidationError):
        ct.smear(TaiInstant(0), LEAP, placement="cosine")


# -- DST -------------------------------------------------------------------

RULE = DstRule(utc("2024-03-10T02:00:00"), utc("2024-11-03T01:00:00"))


def test_dst_outside_unchanged():
    t = utc("2024-01-15T12:00:00")
    local = ct.apply_dst(t, RULE)
    assert local.label == t and not local.dst


def test_dst_inside_adds_3600():
    local = ct.apply_dst(utc("2024-07-01T12:00:00"), RULE)
    assert local.label == utc("2024-07-01T13:00:00") and local.dst and local.utc_offset_s == 3600


def test_dst_gap():
    with pytest.raises(NonexistentTimeError):
        ct.local_to_utc(utc("2024-03-10T02:30:00"), RULE)


def test_dst_ambiguous():
    res = ct.local_to_utc(utc("2024-11-03T01:30:00"), RULE)
    assert res.ambiguous
    assert res.candidates == (utc("2024-11-03T00:30:00"), utc("2024-11-03T01:30:00"))
    assert all(ct.apply_dst(c, RULE).label == utc("2024-11-03T01:30:00") for c in res.candidates)


def test_dst_wrapping_period():
    south = DstRule(utc("2024-10-06T02:00:00"), utc("2024-04-07T02:00:00"), base_offset_s=36_000)
    assert ct.apply_dst(utc("2024-01-10T00:00:00"), south).dst
    assert not ct.apply_dst(utc("2024-07-10T00:00:00"), south).dst


@given(st.integers(min_value=0, max_value=366 * 86_400 - 1))
def test_dst_inverse_property(sec):
    t = CivilTime.from_naive_ns(CivilTime.parse("2024-01-01T00:00:00").to_naive_ns() + sec * NS)
    local = ct.apply_dst(t, RULE)
    assert t in ct.local_to_utc(local.label, RULE).candidates


def test_dst_rule_validation():
    with pytest.raises(ValidationError):
        DstRule(utc("2024-03-10T02:00:00"), utc("2024-03-10T02:00:00"))
