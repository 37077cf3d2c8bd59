# %% [markdown]
# # Four classifiers on UCI data
#
# Naive Bayes, TAN, BAN and GBN on Vote and Car (5-fold CV) and on a Chess
# holdout split of 2130 training and 1066 test cases.

# %%
from bnclassify import evaluate_cv, evaluate_holdout, load_csv, split_holdout

KINDS = ("naive_bayes", "tan", "ban", "gbn")

for path, cls in (("vote", "party"), ("car", -1)):
    ds = load_csv(f"../data/{path}.csv", class_column=cls, name=path)
    for kind in KINDS:
        r = evaluate_cv(kind, ds, k=5, seed=0)
        print(f"{path:6} {kind:12} {100 * r.accuracy:6.2f} ± {100 * r.std:.2f}  features={r.retained_feature_count}")

# %%
chess = load_csv("../data/chess.csv", name="chess")
tr, te = split_holdout(chess, 2130 / chess.n_cases, seed=0)
for kind in KINDS:
    r = evaluate_holdout(kind, tr, te)
    print(f"chess  {kind:12} {100 * r.accuracy:6.2f} ± {100 * r.std:.2f}  features={r.retained_feature_count}")

# %% [markdown]
# GBN classifies with the class's Markov blanket only, so its feature count
# is usually below the total.
