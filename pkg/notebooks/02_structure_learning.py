# %% [markdown]
# # Structure learning with CI tests
#
# Sample from a known network, then watch the three phases of `cbl1`
# (draft, thicken, thin) recover it.

# %%
import numpy as np

from bnclassify.data import AttributeSchema, Dataset
from bnclassify.graph import NodeOrdering, to_edgelist
from bnclassify.learners import Cbl1Trace, cbl1

rng = np.random.default_rng(3)
n = 20_000
a = rng.integers(0, 2, n)
b = rng.integers(0, 2, n)
# collider a -> c <- b, then c -> d
c = np.where(rng.random(n) < 0.1, 1 - (a | b), a | b)
d = np.where(rng.random(n) < 0.15, 1 - c, c)
schema = tuple(AttributeSchema(name, values=("0", "1")) for name in "abcd")
ds = Dataset(schema, 0, np.column_stack([a, b, c, d]))

# %%
trace = Cbl1Trace()
g = cbl1(ds, range(4), NodeOrdering((0, 1, 2, 3)), 0.01, trace=trace)
print("draft tests:", trace.draft_tests, "(n(n-1)/2 =", 4 * 3 // 2, ")")
print("draft arcs:", trace.draft_arcs)
print("thickened:", trace.thickened_arcs)
print("thinned:", trace.thinned_arcs)
print(to_edgelist(g, ds.names))

# %% [markdown]
# Raising the threshold removes weak arcs first.

# %%
for eps in (0.001, 0.01, 0.1, 0.5):
    print(eps, len(cbl1(ds, range(4), NodeOrdering((0, 1, 2, 3)), eps).arcs), "arcs")
