# %% [markdown]
# # Synchronising on a shared vertex
#
# In the prime gadget player `i` can only enter the paid vertex `v` at
# multiples of its own period. Sharing `v` halves (or thirds) the bill, so the
# cheapest profile makes everybody wait until the product of the periods.

# %%
import time

from tngames.equilibria import social_optimum
from tngames.gadgets import gen
from tngames.io import format_path, load_instance

for k, primes in ((2, (2, 3)), (3, (2, 3, 5))):
    inst = load_instance(gen("cs-prime", k=k, primes=primes))
    start = time.perf_counter()
    so = social_optimum(inst.tng)
    took = time.perf_counter() - start
    print(f"k={k} periods={primes}: cost {so.cost}, everybody done at {so.end_time} ({took:.2f}s, {so.product_vertices} product vertices)")
    for p in so.profile:
        print("   ", format_path(inst.tng.network, p))

# %% [markdown]
# The product automaton grows like `(|V|+1)^k`, so the sweep stops early.
