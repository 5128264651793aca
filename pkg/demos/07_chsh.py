"""
The CHSH bound
==============

Local deterministic strategies reach 2 at most; the singlet correlation
-cos(a - b) reaches 2 sqrt 2.
"""

# %%
import math

from simultaneity import chsh

values = {s: chsh.chsh_value(chsh.strategy_table(*s)) for s in chsh.deterministic_strategies()}
print("distinct classical values:", sorted(set(values.values())), "max", chsh.lhv_max())

# %%
table = chsh.singlet_table(*chsh.OPTIMAL_ANGLES)
print(table)
print("singlet at optimal angles:", chsh.chsh_value(table), "vs 2 sqrt 2 =", 2 * math.sqrt(2))

# %%
# Brute force over a grid of angles; pinning a = 0 is exact by rotation symmetry.
for n in (12, 36, 90):
    best, angles = chsh.grid_search(n)
    print(n, best, [round(math.degrees(x), 1) for x in angles])
