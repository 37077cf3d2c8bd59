# %% [markdown]
# # Information measures
#
# Entropy, mutual information and conditional mutual information are the
# only statistics the structure learners look at. Everything is in bits.

# %%
import io

import numpy as np

from bnclassify import conditional_mutual_information, entropy, load_csv, mutual_information
from bnclassify.infotheory import MutualInfoCache

car = load_csv("../data/car.csv", name="car")
c = car.class_index
print("H(class) =", round(entropy(car, c), 4))

# %% [markdown]
# Marginal relevance of each feature to the class.

# %%
for f in car.features:
    print(f"I({car.names[f]}; class) = {mutual_information(car, f, c):.4f}")

# %% [markdown]
# Features of Car are generated independently, so pairwise MI is close to
# zero. Given the class they become weakly dependent: this is what TAN and
# BAN pick up.

# %%
for f, g in [(0, 1), (3, 5)]:
    plain = mutual_information(car, f, g)
    given = conditional_mutual_information(car, f, g, [c])
    print(f"{car.names[f]}-{car.names[g]}: I = {plain:.5f}, I(.|class) = {given:.5f}")

# %% [markdown]
# XOR: each input alone says nothing about the output, jointly they fix it.

# %%
rng = np.random.default_rng(0)
x = rng.integers(0, 2, size=(2, 5000))
text = "a,b,y\n" + "".join(f"{a},{b},{a ^ b}\n" for a, b in x.T)
xor = load_csv(io.StringIO(text))
print("I(a; y) =", round(mutual_information(xor, 0, 2), 4))
print("I(a; y | b) =", round(conditional_mutual_information(xor, 0, 2, [1]), 4))

# %% [markdown]
# The cache keys queries by the unordered pair plus the conditioning set.

# %%
cache = MutualInfoCache(car)
cache.cmi(0, 1, [c])
cache.cmi(1, 0, [c])
print("queries:", cache.queries, "distinct:", cache.computed)
