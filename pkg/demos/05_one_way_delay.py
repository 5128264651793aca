"""
One-way delay is not an observable
==================================

A one-way delay subtracts two different clocks. When the receiver's clock
lags by more than the path delay, packets "arrive before they were sent".
Round-trip time and delay variation never notice.
"""

# %%
from fractions import Fraction

from simultaneity import clocknet as cn
from simultaneity import metrics, sweep

def two_nodes(skew):
    return cn.Scenario(
        (cn.Node("A", position=0), cn.Node("B", cn.ClockModel(skew), position=300)),
        (cn.Link("A", "B", 1000, 1000, jitter_stddev_ns=30),),
        [cn.SyncSession("s", "A", "B", repetitions=4, interval_ns=10_000)],
        seed=3,
    )

for skew in (0, -500, -2000):
    s = two_nodes(skew)
    trace = cn.run(s)
    print(f"skew {skew:+5d}:", metrics.forbidden_zone(trace, s).summary())

# %%
# Forward OWD + reverse OWD always equals the round trip.
samples = metrics.samples_from_trace(cn.run(two_nodes(-2000)))
for req, rep in metrics.request_reply_pairs(samples):
    print(req.msg_id, metrics.one_way_delay(req), metrics.one_way_delay(rep), metrics.rtt(req, rep))

# %%
# Sweeping the synchrony convention moves forward OWD linearly; RTT and PDV stay put.
result = sweep.convention_sweep(two_nodes(0), sweep.build_conventions([Fraction(k, 10) for k in range(1, 10)]))
print(result.to_csv())
print(result.summary)
