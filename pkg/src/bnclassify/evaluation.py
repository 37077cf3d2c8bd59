"""Accuracy estimation and the threshold-searching GBN/BAN wrapper."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, DataError, cv_folds, split_holdout
from .infotheory import DEFAULT_THRESHOLD, MutualInfoCache
from .learners import LearnerConfig, learn
from .model import BayesNet, fit_cpts, predict_batch

DEFAULT_GRID = (0.001, 0.0025, 0.005, 0.01, 0.02, 0.05, 0.1)
SMALL_DATA = 500

REPORT_FIELDS = ("dataset", "kind", "accuracy", "std", "n_test", "features_retained", "threshold", "seconds")


@dataclass
class EvalReport:
    accuracy: float
    std: float
    n_test: int
    retained_feature_count: int
    threshold_used: float | None = None
    wall_time: float = 0.0
    per_fold: list[float] | None = None
    kind: str = ""
    dataset: str = ""

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in [0, 1]")
        if self.std < 0:
            raise ValueError("std must be non-negative")

    def as_record(self) -> dict:
        return {
            "dataset": self.dataset,
            "kind": self.kind,
            "accuracy": self.accuracy,
            "std": self.std,
            "n_test": self.n_test,
            "features_retained": self.retained_feature_count,
            "threshold": self.threshold_used,
            "seconds": self.wall_time,
        }


@dataclass(frozen=True)
class WrapperConfig:
    threshold_grid: tuple[float, ...] = DEFAULT_GRID
    internal_train_fraction: float = 2 / 3
    seed: int = 0
    alpha: float = 1.0

    def __post_init__(self):
        grid = tuple(float(t) for t in self.threshold_grid)
        if not grid:
            raise ValueError("threshold grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("threshold grid must be strictly ascending")
        object.__setattr__(self, "threshold_grid", grid)


def binomial_std(accuracy: float, n: int) -> float:
    return math.sqrt(accuracy * (1.0 - accuracy) / n)


def accuracy_of(bn: BayesNet, test: Dataset) -> float:
    pred = predict_batch(bn, test.cases)
    return float(np.mean(pred == test.column(test.class_index)))


def _config(kind, threshold) -> LearnerConfig:
    cfg = LearnerConfig(kind)
    if cfg.kind in ("ban", "gbn"):
        cfg = LearnerConfig(cfg.kind, DEFAULT_THRESHOLD if threshold is None else threshold)
    return cfg


def train(
    kind: str,
    ds: Dataset,
    threshold: float | None = None,
    alpha: float = 1.0,
    cache: MutualInfoCache | None = None,
) -> BayesNet:
    """Learn structure and tables in one call."""
    return fit_cpts(learn(ds, _config(kind, threshold), cache), ds, alpha)


def evaluate_holdout(
    kind: str,
    train_ds: Dataset,
    test_ds: Dataset,
    threshold: float | None = None,
    alpha: float = 1.0,
) -> EvalReport:
    """Train on one part, report 0-1 accuracy and its binomial standard error."""
    if not train_ds.same_schema(test_ds):
        raise DataError("training and test sets have different schemas")
    start = time.perf_counter()
    cfg = _config(kind, threshold)
    bn = train(cfg.kind, train_ds, threshold, alpha)
    acc = accuracy_of(bn, test_ds)
    return EvalReport(
        accuracy=acc,
        std=binomial_std(acc, test_ds.n_cases),
        n_test=test_ds.n_cases,
        retained_feature_count=len(bn.structure.retained_features),
        threshold_used=cfg.threshold.epsilon if cfg.threshold else None,
        wall_time=time.perf_counter() - start,
        kind=cfg.kind,
        dataset=train_ds.name,
    )


def evaluate_cv(
    kind: str,
    ds: Dataset,
    k: int = 5,
    threshold: float | None = None,
    seed: int = 0,
    alpha: float = 1.0,
) -> EvalReport:
    """Mean fold accuracy with the across-fold sample standard deviation.

    ``retained_feature_count`` is the largest count seen over the folds.
    """
    start = time.perf_counter()
    cfg = _config(kind, threshold)
    accs, retained = [], []
    for tr, te in cv_folds(ds, k, seed):
        bn = train(cfg.kind, tr, threshold, alpha)
        accs.append(accuracy_of(bn, te))
        retained.append(len(bn.structure.retained_features))
    return EvalReport(
        accuracy=float(np.mean(accs)),
        std=float(np.std(accs, ddof=1)),
        n_test=ds.n_cases,
        retained_feature_count=max(retained),
        threshold_used=cfg.threshold.epsilon if cfg.threshold else None,
        wall_time=time.perf_counter() - start,
        per_fold=accs,
        kind=cfg.kind,
        dataset=ds.name,
    )


@dataclass
class WrapperSearch:
    """Internal scores per (kind, threshold) and the chosen combination."""

    scores: dict[str, dict[float, float]] = field(default_factory=dict)
    best: dict[str, float] = field(default_factory=dict)
    winner: str = ""
    threshold: float = DEFAULT_THRESHOLD
    caches: list[MutualInfoCache] = field(default_factory=list)
    n_scored: int = 0

    def best_score(self, kind: str) -> float:
        return self.scores[kind][self.best[kind]]


def wrapper_search(train_ds: Dataset, wc: WrapperConfig = WrapperConfig()) -> WrapperSearch:
    """Score every grid threshold for GBN and BAN on internal held-out data.

    Large training sets use one ``internal_train_fraction`` split; sets
    smaller than 500 cases use internal 3-fold cross validation. All
    mutual-information results are shared through one cache per internal
    training set, across thresholds and both learners.
    """
    if train_ds.n_cases < SMALL_DATA:
        k = min(3, train_ds.n_cases)
        parts = cv_folds(train_ds, k, wc.seed)
    else:
        parts = [split_holdout(train_ds, wc.internal_train_fraction, wc.seed)]
    caches = [MutualInfoCache(tr) for tr, _ in parts]
    search = WrapperSearch(caches=caches, n_scored=sum(te.n_cases for _, te in parts))
    for kind in ("gbn", "ban"):
        search.scores[kind] = {}
        for eps in wc.threshold_grid:
            accs = []
            for (tr, te), cache in zip(parts, caches):
                bn = train(kind, tr, eps, wc.alpha, cache)
                accs.append(accuracy_of(bn, te))
            search.scores[kind][eps] = float(np.mean(accs))
        # equal scores: prefer the larger threshold (sparser graph)
        search.best[kind] = max(wc.threshold_grid, key=lambda e: (search.scores[kind][e], e))
    gbn, ban = search.best_score("gbn"), search.best_score("ban")
    search.winner = "gbn" if gbn >= ban else "ban"
    search.threshold = search.best[search.winner]
    return search


def wrapper_select(train_ds: Dataset, wc: WrapperConfig = WrapperConfig()) -> tuple[BayesNet, EvalReport]:
    """Pick the better of GBN and BAN over a threshold grid, refit on all data.

    The winning structure (learned on the internal training part) is kept;
    only its tables are re-estimated from the full training set. The report
    carries the internal held-out accuracy of the winner.
    """
    start = time.perf_counter()
    search = wrapper_search(train_ds, wc)
    if train_ds.n_cases < SMALL_DATA:
        # no single internal split to keep: relearn the structure on everything
        structure_src = train_ds
        cache = MutualInfoCache(train_ds)
    else:
        cache = search.caches[0]
        structure_src = cache.ds
    structure = learn(structure_src, LearnerConfig(search.winner, search.threshold), cache)
    bn = fit_cpts(structure, train_ds, wc.alpha)
    acc = search.best_score(search.winner)
    report = EvalReport(
        accuracy=acc,
        std=binomial_std(acc, search.n_scored),
        n_test=search.n_scored,
        retained_feature_count=len(structure.retained_features),
        threshold_used=search.threshold,
        wall_time=time.perf_counter() - start,
        kind=search.winner,
        dataset=train_ds.name,
    )
    return bn, report


def format_report(report: EvalReport, fmt: str = "text") -> str:
    """Render a report as an aligned text line or as JSON.

    Text output shows accuracy and std as percentages with two decimals.
    """
    rec = report.as_record()
    if fmt == "json":
        return json.dumps(rec, sort_keys=False)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    thr = "-" if rec["threshold"] is None else f"{rec['threshold']:g}"
    return (
        f"{rec['dataset'] or '-':<12} {rec['kind']:<12} {100 * rec['accuracy']:6.2f}±{100 * rec['std']:.2f}"
        f"  n_test={rec['n_test']}  features={rec['features_retained']}  threshold={thr}"
        f"  seconds={rec['seconds']:.2f}"
    )


def report_from_record(rec: dict) -> EvalReport:
    return EvalReport(
        accuracy=rec["accuracy"],
        std=rec["std"],
        n_test=rec["n_test"],
        retained_feature_count=rec["features_retained"],
        threshold_used=rec["threshold"],
        wall_time=rec["seconds"],
        kind=rec["kind"],
        dataset=rec["dataset"],
    )


__all__ = [
    "DEFAULT_GRID",
    "EvalReport",
    "WrapperConfig",
    "WrapperSearch",
    "accuracy_of",
    "binomial_std",
    "evaluate_cv",
    "evaluate_holdout",
    "format_report",
    "train",
    "wrapper_search",
    "wrapper_select",
]
