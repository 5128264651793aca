"""
Causal order versus timestamp order
===================================

Happens-before is fixed by messages; timestamp order between unconnected
events is a convention. The audit re-times every event under many synchrony
conventions and frames and counts which pairs change order.
"""

# %%
from simultaneity import causal
from simultaneity import clocknet as cn

scenario = cn.Scenario(
    (cn.Node("A", position=0), cn.Node("B", position=1000)),
    (cn.Link("A", "B", 1000, 1000),),
    [cn.Message("ping", "A", "B", 0), cn.Tick("a", "A", 1000), cn.Tick("b", "B", 1200)],
)
trace = cn.run(scenario)
for i, e in enumerate(trace):
    print(i, e.kind, e.node, e.msg_id, e.true_time_ns)

# %%
# Logical clocks: Lamport stamps respect happens-before; vector stamps also expose concurrency.
print("lamport:", causal.lamport_timestamps(trace))
for i, v in enumerate(causal.vector_timestamps(trace)):
    print(i, dict(v.components))

# %%
report = causal.fito_audit(trace, scenario)
print(f"{report.spacelike_pairs} spacelike pairs, {report.flipped_pairs} flip, "
      f"{report.timelike_violations} causal pairs reordered")
for row in report.pairs:
    orders = set(row["orders"].values())
    print(row["pair"], row["class"], sorted(orders))
