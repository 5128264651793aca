"""
Simultaneity depends on the frame
=================================

Two events can be simultaneous in one inertial frame and ordered either way
in others. Units: c = 1, times and distances in light-nanoseconds.
"""

# %%
# Two events 1000 light-ns apart, 200 ns apart in time: spacelike.
import numpy as np

from simultaneity.spacetime import (
    SpacetimeEvent, boost, boost_many, classify_interval, compose_velocities, interval, order_in_frame,
)

a = SpacetimeEvent(t=0.0, x=0.0)
b = SpacetimeEvent(t=200.0, x=1000.0)
print("interval class:", classify_interval(b - a).value)

# %%
# Their order depends on the observer's velocity.
for v in (-0.9, -0.5, 0.0, 0.2, 0.5, 0.9):
    print(f"v = {v:+.1f}: a is {order_in_frame(a, b, v).value} b")

# %%
# A timelike pair (signal could travel between them) keeps its order in every frame.
c = SpacetimeEvent(t=1500.0, x=1000.0)
print("timelike:", {v: order_in_frame(a, c, v).value for v in (-0.99, 0.0, 0.99)})

# %%
# The interval is what all frames agree on.
dt, dx = np.random.default_rng(0).uniform(-1e3, 1e3, (2, 5))
bt, bx = boost_many(dt, dx, 0.6)
print("interval before:", dt**2 - dx**2)
print("interval after: ", bt**2 - bx**2)

# %%
# Two boosts compose into one boost with the relativistic sum of velocities.
u, w = 0.5, 0.5
print("0.5 (+) 0.5 =", compose_velocities(u, w))
print(boost(boost((1.0, 0.3), u), w), "==", boost((1.0, 0.3), compose_velocities(u, w)))
print("interval of (1, 0.3):", interval((1.0, 0.3)))
