"""
Version age along a line of gossiping nodes
===========================================

A ring cut by jammers falls apart into lines.  Corner nodes hear from a
single neighbour, so they are the stalest; ages fall towards the centre.
Adding the missing link (the "mini-ring") gives a lower bound, and twice
the mini-ring age is an upper bound on every node of the line.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ringgossip import Rates, line_ages, ring_node_age, sandwich_check

n = 256          # size of the original ring
rates = Rates(lambda_s=1.0, lambda_=1.0, n=n)

# %%
# Per-node ages for a few line lengths inside the same ring
fig, ax = plt.subplots()
for n0 in (8, 32, 128, 256):
    ages = line_ages(n0, rates).ages
    x = (np.arange(n0) + 0.5) / n0
    ax.plot(x, ages, label=f"line of {n0}")
    ax.axhline(ring_node_age(n0, rates), ls=":", lw=0.8, color=ax.lines[-1].get_color())
ax.set_xlabel("relative position along the line")
ax.set_ylabel("version age")
ax.legend()
fig.savefig("line_ages.png", dpi=120)

# %%
# The sandwich: ring age <= any line age <= 2 x ring age
for n0 in (1, 2, 16, 64, 256):
    lo, worst, hi = sandwich_check(n0, rates)
    print(f"n0={n0:4d}  ring={lo:8.3f}  worst line node={worst:8.3f}  2*ring={hi:8.3f}")
