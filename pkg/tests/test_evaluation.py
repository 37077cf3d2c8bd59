import json
import math

import numpy as np
import pytest

from bnclassify.data import DataError, cv_folds, load_csv, split_holdout
from bnclassify.evaluation import (
    DEFAULT_GRID,
    REPORT_FIELDS,
    EvalReport,
    WrapperConfig,
    accuracy_of,
    binomial_std,
    evaluate_cv,
    evaluate_holdout,
    format_report,
    report_from_record,
    train,
    wrapper_search,
    wrapper_select,
)
from bnclassify.infotheory import MutualInfoCache
from bnclassify.learners import LearnerConfig, learn
from bnclassify.model import fit_cpts
from oracles import make_dataset


@pytest.fixture(scope="module")
def car():
    return load_csv("data/car.csv", name="car")


@pytest.fixture(scope="module")
def vote():
    return load_csv("data/vote.csv", class_column="party", name="vote")


class TestBinomialStd:
    def test_values(self):
        assert binomial_std(0.5, 100) == 0.05
        assert binomial_std(1.0, 10) == 0.0
        assert binomial_std(0.8611, 16281) == pytest.approx(0.0027, abs=5e-5)


class TestReports:
    def test_accuracy_bounds(self):
        with pytest.raises(ValueError):
            EvalReport(accuracy=1.2, std=0.0, n_test=1, retained_feature_count=0)
        with pytest.raises(ValueError):
            EvalReport(accuracy=0.5, std=-0.1, n_test=1, retained_feature_count=0)

    def test_text_and_json(self):
        r = EvalReport(0.8989, 0.0529, 435, 16, None, 1.5, kind="naive_bayes", dataset="vote")
        text = format_report(r)
        assert " 89.89±5.29" in text and "threshold=-" in text and "features=16" in text
        rec = json.loads(format_report(r, "json"))
        assert tuple(rec) == REPORT_FIELDS
        assert report_from_record(rec).as_record() == r.as_record()
        with pytest.raises(ValueError):
            format_report(r, "xml")


class TestHoldoutAndCv:
    def test_holdout(self, car):
        tr, te = split_holdout(car, 2 / 3, seed=0)
        r = evaluate_holdout("naive-bayes", tr, te)
        bn = train("naive_bayes", tr)
        assert r.accuracy == accuracy_of(bn, te)
        assert r.std == pytest.approx(math.sqrt(r.accuracy * (1 - r.accuracy) / te.n_cases))
        assert r.n_test == te.n_cases == 576
        assert r.threshold_used is None and r.kind == "naive_bayes"

    def test_holdout_threshold_recorded(self, car):
        tr, te = split_holdout(car, 2 / 3, seed=0)
        assert evaluate_holdout("gbn", tr, te).threshold_used == 0.01
        assert evaluate_holdout("ban", tr, te, threshold=0.05).threshold_used == 0.05

    def test_schema_mismatch(self, car, vote):
        with pytest.raises(DataError):
            evaluate_holdout("nb", car, vote)

    def test_cv_uses_sample_std_of_folds(self, vote):
        r = evaluate_cv("tan", vote, k=5, seed=3)
        accs = [accuracy_of(train("tan", tr), te) for tr, te in cv_folds(vote, 5, 3)]
        assert r.per_fold == accs
        assert r.accuracy == pytest.approx(np.mean(accs))
        assert r.std == pytest.approx(np.std(accs, ddof=1))
        assert r.n_test == vote.n_cases

    def test_cv_is_seeded(self, vote):
        a = evaluate_cv("nb", vote, k=5, seed=7)
        b = evaluate_cv("nb", vote, k=5, seed=7)
        assert a.per_fold == b.per_fold


class TestWrapper:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            WrapperConfig(threshold_grid=())
        with pytest.raises(ValueError):
            WrapperConfig(threshold_grid=(0.1, 0.01))
        assert WrapperConfig().threshold_grid == DEFAULT_GRID

    def test_ties_prefer_gbn_and_larger_threshold(self):
        # the class copies feature 0: every candidate is perfect
        rng = np.random.default_rng(0)
        x = rng.integers(0, 2, size=900)
        noise = rng.integers(0, 3, size=900)
        ds = make_dataset([x, x, noise], class_index=0, cards=[2, 2, 3])
        search = wrapper_search(ds, WrapperConfig(threshold_grid=(0.001, 0.01, 0.1)))
        assert search.best_score("gbn") == search.best_score("ban") == 1.0
        assert search.winner == "gbn"
        assert search.threshold == 0.1

    def test_structure_from_internal_split_tables_from_everything(self, car):
        wc = WrapperConfig(threshold_grid=(0.005, 0.02), seed=4)
        bn, report = wrapper_select(car, wc)
        search = wrapper_search(car, wc)
        inner_train, inner_test = split_holdout(car, wc.internal_train_fraction, wc.seed)
        expected = learn(inner_train, LearnerConfig(search.winner, search.threshold))
        assert bn.structure.dag.arcs == expected.dag.arcs
        refit = fit_cpts(expected, car, wc.alpha)
        for n in bn.nodes:
            np.testing.assert_array_equal(bn.cpts[n].table, refit.cpts[n].table)
        assert report.kind == search.winner
        assert report.threshold_used == search.threshold
        assert report.accuracy == search.best_score(search.winner)
        assert report.n_test == inner_test.n_cases

    def test_scores_match_independent_runs(self, car):
        wc = WrapperConfig(threshold_grid=(0.001, 0.05))
        search = wrapper_search(car, wc)
        tr, te = split_holdout(car, wc.internal_train_fraction, wc.seed)
        for kind in ("gbn", "ban"):
            for eps in wc.threshold_grid:
                assert search.scores[kind][eps] == accuracy_of(train(kind, tr, eps), te)

    def test_one_cache_serves_the_whole_grid(self, car):
        search = wrapper_search(car, WrapperConfig())
        assert len(search.caches) == 1
        cache = search.caches[0]
        fresh = MutualInfoCache(cache.ds)
        for kind in ("gbn", "ban"):
            for eps in DEFAULT_GRID:
                learn(cache.ds, LearnerConfig(kind, eps), fresh)
        assert set(fresh.keys()) == set(cache.keys())

    def test_small_training_set_uses_internal_cv(self, vote):
        small = vote.subset(np.arange(300))
        search = wrapper_search(small, WrapperConfig(threshold_grid=(0.01, 0.05)))
        assert len(search.caches) == 3
        assert search.n_scored == 300
        bn, report = wrapper_select(small, WrapperConfig(threshold_grid=(0.01, 0.05)))
        assert report.n_test == 300
        assert bn.structure.kind in ("gbn", "ban")
