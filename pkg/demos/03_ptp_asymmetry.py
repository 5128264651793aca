"""
What a four-timestamp sync can and cannot see
=============================================

Master and slave clocks are both perfect, but the path is slower one way.
The protocol assumes symmetry and so "corrects" the slave by half the
asymmetry.
"""

# %%
from fractions import Fraction

from simultaneity import clocknet as cn
from simultaneity import syncproto as sp

scenario = cn.Scenario(
    (cn.Node("M"), cn.Node("S")),
    (cn.Link("M", "S", delay_ab_ns=1500, delay_ba_ns=500),),
)
(x,) = sp.run_sync_exchanges(scenario, "M", "S")
print(x)
print(sp.ptp_estimate(x), "<- true offset is 0; the bias is (1500 - 500) / 2")

# %%
# Slave offsets shift the estimate one-for-one; the asymmetry bias stays.
for b in (-300, 0, 700):
    s = cn.Scenario((cn.Node("M"), cn.Node("S", cn.ClockModel(b))), scenario.links)
    (xb,) = sp.run_sync_exchanges(s, "M", "S")
    print(f"true offset {b:+5d}: estimate {sp.ptp_estimate(xb).offset_ns:+5d}")

# %%
# Re-synchronising the slave under convention eps moves the offset linearly.
# Round-trip time only reads the master clock, so every convention agrees on it.
for eps in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)):
    _, t2, t3, _ = sp.reassign_slave(x, eps)
    print(f"eps {eps}: slave stamps {t2}, {t3}; offset {sp.offset_under_convention(x, eps)}; rtt {x.round_trip}")
