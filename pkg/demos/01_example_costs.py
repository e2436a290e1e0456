# %% [markdown]
# # Costs of a two-message routing game
#
# Two messages leave router `s`. Each router may hold a message for one to two
# time units, and each destination only accepts arrivals in a short window.
# The fixture ships one profile, `p1`.

# %%
from tngames import load
from tngames.core import cost_of, decompose, potential
from tngames.io import format_path

inst = load("example1")
tng, p1 = inst.tng, inst.profiles["p1"]
for i, p in enumerate(p1, 1):
    print(f"player {i}: {format_path(tng.network, p)}")

# %% [markdown]
# Periods are the stretches in which nobody moves. Loads are constant inside
# each of them, so costs are a finite sum.

# %%
dec = decompose(p1)
for (a, b), load in zip(dec.periods, dec.loads):
    occupied = {tng.network.vertices[v]: n for v, n in load.items()}
    print(f"[{a}, {b}]  {occupied}")

# %%
costs = cost_of(tng, p1)
print("per player:", [str(c) for c in costs.per_player], "total:", costs.total)
print("potential:", potential(tng, p1))
