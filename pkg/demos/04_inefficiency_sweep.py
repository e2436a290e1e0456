# %% [markdown]
# # How bad are the equilibria we find?
#
# Random small games per latency family. For each, run dynamics from the
# social optimum and from a random profile and compare the equilibrium cost
# against the optimum.

# %%
import random
from collections import defaultdict

from tngames.equilibria import find_ne, inefficiency, social_optimum
from tngames.gadgets import random_tng
from tngames.oracle import EnumerationBudget, enum_strategies

rng = random.Random(1)
ratios = defaultdict(list)
for family in ("cost-sharing", "affine"):
    while len(ratios[family]) < 60:
        tng = random_tng(rng, family)
        so = social_optimum(tng)
        if tng.k < 2 or so.cost == 0:
            continue
        cands = [list(enum_strategies(tng, i, EnumerationBudget(), by_signature=True)) for i in range(tng.k)]
        for seed in (None, tuple(rng.choice(c) for c in cands)):
            ne, _ = find_ne(tng, seed)
            rep = inefficiency(tng, ne, so_cost=so.cost)
            ratios[family].append(rep.ratio)

# %%
for family, rs in ratios.items():
    worse = sum(r > 1 for r in rs)
    print(f"{family:>13}: {len(rs)} equilibria, {worse} above the optimum, worst {max(rs)}")
