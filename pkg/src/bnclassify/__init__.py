"""Bayesian-network classifiers learned with information-theoretic CI tests.

Naive Bayes, TAN, BAN and GBN learners over categorical data, exact class
posteriors, a threshold-searching wrapper, and BIF 0.15 persistence.
"""

__version__ = "0.1.0"

from .bif import BifError, export_bif, parse_bif
from .data import (
    AttributeSchema,
    Dataset,
    DataError,
    align_schemas,
    cv_folds,
    discretize,
    load_csv,
    split_holdout,
)
from .evaluation import (
    EvalReport,
    WrapperConfig,
    evaluate_cv,
    evaluate_holdout,
    format_report,
    train,
    wrapper_select,
)
from .graph import Dag, GraphError, NodeOrdering, adjacency_path_exists, cut_set, markov_blanket
from .infotheory import (
    MiThreshold,
    MutualInfoCache,
    conditional_mutual_information,
    entropy,
    mutual_information,
)
from .learners import LearnedStructure, LearnerConfig, cbl1, chow_liu_tree, learn
from .model import BayesNet, Cpt, fit_cpts, posterior, predict, prune_to_blanket
