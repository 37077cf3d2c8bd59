# %% [markdown]
# # Threshold search
#
# The wrapper scores GBN and BAN over a grid of thresholds on an internal
# split of the training data, keeps the better pair, and refits the tables
# on all training cases.

# %%
from bnclassify import WrapperConfig, evaluate_holdout, load_csv, split_holdout, wrapper_select
from bnclassify.evaluation import accuracy_of, wrapper_search

chess = load_csv("../data/chess.csv", name="chess")
tr, te = split_holdout(chess, 2130 / chess.n_cases, seed=0)

# %%
search = wrapper_search(tr, WrapperConfig())
for kind, scores in search.scores.items():
    print(kind, {eps: round(100 * s, 2) for eps, s in scores.items()})
print("winner:", search.winner, "threshold:", search.threshold)
print("distinct CMI evaluations:", search.caches[0].computed)

# %%
bn, _ = wrapper_select(tr)
print("wrapper test accuracy:", round(100 * accuracy_of(bn, te), 2))
for kind in ("gbn", "ban", "tan"):
    print(kind, "default:", round(100 * evaluate_holdout(kind, tr, te).accuracy, 2))
