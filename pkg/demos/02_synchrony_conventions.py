"""
Choosing a synchrony convention
===============================

A light signal leaves clock A at t1, bounces off B and returns at t3. Which A
reading is simultaneous with the bounce? Any t1 + eps (t3 - t1) with
0 < eps < 1 agrees with every round-trip measurement.
"""

# %%
from fractions import Fraction

from simultaneity.conventions import (
    INSTANTANEOUS, epsilon_to_kappa, gps_rates, kappa_speeds, kappa_to_epsilon, modified_gamma, reichenbach_assign,
)

t1, t3 = 0, 2000
for eps in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)):
    print(f"eps = {eps}: bounce assigned A-time {reichenbach_assign(t1, t3, eps)}")

# %%
# The same freedom written as anisotropic one-way light speeds 1/(1 -+ kappa).
for kappa in (Fraction(-1, 2), Fraction(0), Fraction(1, 2)):
    out, back = kappa_speeds(kappa)
    print(f"kappa = {kappa}: outbound c = {out}, return c = {back}, eps = {kappa_to_epsilon(kappa)}")
print("round trip speed stays 1; eps = 0.25 is kappa =", epsilon_to_kappa(Fraction(1, 4)))

# %%
# kappa = 1 means an instantaneous leg, kept as a named sentinel rather than inf.
print(kappa_speeds(1)[0] is INSTANTANEOUS)

# %%
# Time dilation acquires a convention-dependent factor (1 - kappa v).
for kappa in (-0.5, 0.0, 0.5):
    print(f"kappa = {kappa:+.1f}: gamma at v = 0.6 -> {modified_gamma(0.6, kappa):.4f}")

# %%
# GPS satellites: orbital speed slows them, the weaker potential speeds them up.
r = gps_rates()
print(f"velocity {r.velocity_per_day:+.2f} us/day, gravity {r.gravity_per_day:+.2f} us/day, net {r.net_per_day:+.2f} us/day")
