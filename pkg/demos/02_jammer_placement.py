"""
Where should a jammer cut?
==========================

Splitting a mini-ring of ``n0`` nodes into ``m`` and ``n0 - m`` nodes costs
least when the split is balanced and most when it isolates a single node.
Applied to many jammers: equidistant cuts are the mildest, adjacent cuts
(leaving isolated nodes plus one long line) the worst.
"""

from ringgossip import (
    PlacementStrategy,
    Rates,
    partition_from_placement,
    place,
    split_total_age,
    system_age,
    to_miniring_model,
)

rates = Rates(1.0, 1.0, n=64)

# %%
# One cut in a mini-ring of 40 nodes
for m in range(1, 21):
    print(f"m={m:2d}  total age={split_total_age(40, m, rates):9.3f}")

# %%
# Many jammers on a ring of 64 nodes
n = rates.n
for n_jam in (2, 4, 8, 16):
    row = []
    for name, strategy in [("adjacent", PlacementStrategy.adjacent()),
                           ("random", PlacementStrategy.random(seed=1)),
                           ("equidistant", PlacementStrategy.equidistant())]:
        p = partition_from_placement(place(strategy, n, n_jam), n)
        row.append(f"{name}: line {system_age(p, rates):7.3f} / "
                   f"mini-ring {system_age(to_miniring_model(p), rates):7.3f}")
    print(f"{n_jam:2d} jammers  " + "   ".join(row))
