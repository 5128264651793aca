"""
Leap seconds, smears and daylight saving
========================================

Civil time is atomic time plus a table of conventions.
"""

# %%
from simultaneity import civiltime as ct

table = ct.load_leap_table()
print(f"{len(table.steps)} leap seconds since 1972, all positive: {all(s == 1 for s in table.steps)}")

# %%
# The last minute of 2016 had 61 seconds.
start = ct.utc_to_tai(ct.CivilTime.parse("2016-12-31T23:59:58"), table)
for k in range(4):
    print(ct.render_utc(start + k * 10**9, table))

# %%
# A smear spreads that second over the preceding 24 hours instead.
leap = ct.leap_events(table)[-1]
lo, hi = ct.smear_window(leap)
for frac in (0, 0.25, 0.5, 0.75, 1):
    t = ct.TaiInstant(lo + int((hi - lo) * frac))
    print(f"{frac:4}: smeared - unsmeared = {ct.smear(t, leap) - ct.unsmeared(t, leap):>12} ns")
print(f"rate offset {ct.smear_rate_ppb():.2f} ppb")

# %%
# UT1 drifts; the table exists to keep |UTC - UT1| < 0.9 s.
print([ct.check_leap_constraint(x) for x in (0.0, 0.5, 0.9)])

# %%
# Daylight saving: one hour skipped in spring, one repeated in autumn.
rule = ct.DstRule(ct.CivilTime.parse("2024-03-10T02:00:00"), ct.CivilTime.parse("2024-11-03T01:00:00"))
print(ct.apply_dst(ct.CivilTime.parse("2024-07-01T12:00:00"), rule))
print(ct.local_to_utc(ct.CivilTime.parse("2024-11-03T01:30:00"), rule))
try:
    ct.local_to_utc(ct.CivilTime.parse("2024-03-10T02:30:00"), rule)
except ct.NonexistentTimeError as exc:
    print("gap:", exc)
