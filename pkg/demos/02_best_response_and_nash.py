# %% [markdown]
# # Best responses and equilibrium dynamics
#
# Starting from `p1`, ask each player whether a cheaper route exists, then let
# players take turns switching until nobody wants to.

# %%
from tngames import load
from tngames.core import cost_of
from tngames.equilibria import best_response, find_ne, is_ne
from tngames.io import format_path
from tngames.oracle import oracle_br

inst = load("example1")
tng, p1 = inst.tng, inst.profiles["p1"]
net = tng.network

for i in range(tng.k):
    br = best_response(tng, p1, i)
    print(f"player {i + 1}: pays {br.current_cost}, could pay {br.cost} via {format_path(net, br.strategy)}")
    print(f"  brute force agrees: {oracle_br(tng, p1, i) == br.cost}")

# %%
print("p1 is an equilibrium:", bool(is_ne(tng, p1)))

# %% [markdown]
# Every improving move lowers the potential by exactly the mover's gain.

# %%
ne, trace = find_ne(tng, p1)
for step in trace.steps:
    print(f"player {step.player + 1}: {step.old_cost} -> {step.new_cost}, potential {step.psi_before} -> {step.psi_after}")
print("equilibrium costs:", [str(c) for c in cost_of(tng, ne).per_player])
