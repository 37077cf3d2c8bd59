# %% [markdown]
# # Adult: supervised discretization
#
# Continuous columns are cut by class-entropy splitting with an MDL stopping
# rule. A column that earns no cut point (here `fnlwgt`) is ignored by the
# learners.

# %%
from bnclassify import discretize, evaluate_holdout, load_csv, split_holdout
from bnclassify.data import align_schemas

raw = load_csv("../data/adult.csv.gz", continuous="auto", name="adult")
tr_raw, te_raw = split_holdout(raw, 2 / 3, seed=0)
tr = discretize(tr_raw)
te = discretize(te_raw, cuts_from=tr)
tr, te = align_schemas(tr, te)

for a in tr.schema:
    if a.cut_points is not None:
        print(f"{a.name:15} {len(a.cut_points):2} cuts  ignored={a.ignored}")

# %%
for kind in ("naive_bayes", "tan", "gbn"):
    r = evaluate_holdout(kind, tr, te)
    print(f"{kind:12} {100 * r.accuracy:6.2f} ± {100 * r.std:.2f}  features={r.retained_feature_count}")
