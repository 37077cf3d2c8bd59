"""Structure learners for the four Bayesian-network classifier families.

Naive Bayes fixes the structure. TAN grows a maximum-weight spanning tree
over the features under class-conditional mutual information. BAN and GBN
both run the ordered three-phase CI learner (draft, thicken, thin); BAN
conditions every test on the class, GBN treats the class as an ordinary
node and keeps only its Markov blanket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .data import Dataset
from .graph import Dag, NodeOrdering, adjacency_path_exists, cut_set, markov_blanket
from .infotheory import DEFAULT_THRESHOLD, MiThreshold, MutualInfoCache

KINDS = ("naive_bayes", "tan", "ban", "gbn")
THRESHOLD_KINDS = ("ban", "gbn")


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    threshold: MiThreshold | None = None

    def __post_init__(self):
        kind = normalize_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if isinstance(self.threshold, (int, float)):
            object.__setattr__(self, "threshold", MiThreshold(float(self.threshold)))
        if kind in THRESHOLD_KINDS and self.threshold is None:
            object.__setattr__(self, "threshold", MiThreshold(DEFAULT_THRESHOLD))
        elif kind not in THRESHOLD_KINDS and self.threshold is not None:
            raise ValueError(f"{kind} takes no threshold")


def normalize_kind(kind: str) -> str:
    k = kind.lower().replace("-", "_")
    k = {"nb": "naive_bayes", "naivebayes": "naive_bayes"}.get(k, k)
    if k not in KINDS:
        raise ValueError(f"unknown classifier kind {kind!r}")
    return k


@dataclass(frozen=True)
class LearnedStructure:
    dag: Dag
    class_node: int
    retained_features: frozenset[int]
    kind: str
    threshold: float | None = None


@dataclass
class Cbl1Trace:
    """Counters and intermediate results filled in by :func:`cbl1`."""

    draft_tests: int = 0
    thicken_tests: int = 0
    thin_tests: int = 0
    draft_arcs: list[tuple[int, int]] = field(default_factory=list)
    thickened_arcs: list[tuple[int, int]] = field(default_factory=list)
    thinned_arcs: list[tuple[int, int]] = field(default_factory=list)


def _ordering(ds: Dataset, nodes: Iterable[int]) -> NodeOrdering:
    return NodeOrdering.classifier(ds.class_index, nodes)


def _check_features(ds: Dataset) -> list[int]:
    feats = ds.features
    if not feats:
        raise ValueError("dataset has no usable features")
    return feats


def learn_naive_bayes(ds: Dataset) -> LearnedStructure:
    feats = _check_features(ds)
    c = ds.class_index
    dag = Dag.empty(_ordering(ds, feats))
    for f in feats:
        dag = dag.add_arc(c, f)
    return LearnedStructure(dag, c, frozenset(feats), "naive_bayes")


def chow_liu_tree(
    features: Iterable[int], score: Callable[[int, int], float]
) -> list[tuple[int, int]]:
    """Maximum-weight spanning tree by descending-score edge insertion.

    ``score`` is called exactly once per unordered pair. Ties are broken by
    pair position in lexicographic order, so the result is deterministic.
    """
    nodes = sorted(features)
    if not nodes:
        raise ValueError("need at least one feature")
    scored = [(score(i, j), i, j) for i, j in itertools.combinations(nodes, 2)]
    scored.sort(key=lambda t: -t[0])  # stable: lower pair first among ties
    root = {n: n for n in nodes}

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    edges = []
    for _, i, j in scored:
        ri, rj = find(i), find(j)
        if ri != rj:
            root[rj] = ri
            edges.append((i, j))
            if len(edges) == len(nodes) - 1:
                break
    return edges


def learn_tan(ds: Dataset, cache: MutualInfoCache | None = None) -> LearnedStructure:
    feats = _check_features(ds)
    c = ds.class_index
    cache = cache or MutualInfoCache(ds)
    edges = chow_liu_tree(feats, lambda i, j: cache.cmi(i, j, (c,)))
    # direct the tree away from the first feature: breadth-first ranks do it
    adj = {f: [] for f in feats}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    order, seen = [], set()
    for start in feats:
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    dag = Dag.empty(NodeOrdering((c, *order)))
    for f in feats:
        dag = dag.add_arc(c, f)
    for i, j in edges:
        dag = dag.add_arc(i, j)
    return LearnedStructure(dag, c, frozenset(feats), "tan")


def cbl1(
    ds: Dataset,
    nodes: Iterable[int],
    ordering: NodeOrdering,
    t: MiThreshold | float,
    aug: int | None = None,
    cache: MutualInfoCache | None = None,
    trace: Cbl1Trace | None = None,
) -> Dag:
    """Three-phase CI structure learning under a fixed node ordering.

    Every test is ``I(i; j | Z)`` compared with ``t``; with ``aug`` set, the
    augmenting node is added to every conditioning set (and ``Z`` is empty
    in the draft phase otherwise).

    1. Draft: score all pairs, keep those above ``t`` in descending order and
       insert an arc whenever the endpoints are not yet connected.
    2. Thicken: for each skipped pair, add the arc if the pair stays dependent
       given its current cut set.
    3. Thin: for each arc whose endpoints are still connected without it,
       drop it if the pair is independent given the cut set.
    """
    eps = t.epsilon if isinstance(t, MiThreshold) else float(t)
    nodes = [n for n in ordering.order if n in set(nodes)]
    if aug is not None and aug in nodes:
        raise ValueError("the augmenting node must not be among the learned nodes")
    cache = cache or MutualInfoCache(ds)
    trace = trace if trace is not None else Cbl1Trace()
    extra = (aug,) if aug is not None else ()

    def cmi(i, j, z=()):
        return cache.cmi(i, j, (*z, *extra))

    g = Dag.empty(ordering.restrict(nodes))

    # draft
    candidates = []
    for i, j in itertools.combinations(sorted(nodes), 2):
        trace.draft_tests += 1
        s = cmi(i, j)
        if s > eps:
            candidates.append((s, i, j))
    candidates.sort(key=lambda x: -x[0])
    skipped = []
    for s, i, j in candidates:
        if adjacency_path_exists(g, i, j):
            skipped.append((i, j))
        else:
            g = g.add_arc(i, j)
            trace.draft_arcs.append((i, j))

    # thicken
    for i, j in skipped:
        if g.has_edge(i, j):
            continue
        z = cut_set(g, i, j)
        trace.thicken_tests += 1
        if cmi(i, j, z) > eps:
            g = g.add_arc(i, j)
            trace.thickened_arcs.append((i, j))

    # thin
    for arc in list(g.arcs):
        i, j = arc
        trial = g.remove_arc(i, j)
        if not adjacency_path_exists(trial, i, j):
            continue
        z = cut_set(trial, i, j)
        trace.thin_tests += 1
        if not cmi(i, j, z) > eps:
            g = trial
            trace.thinned_arcs.append(arc)
    return g


def learn_ban(
    ds: Dataset,
    t: MiThreshold | float = DEFAULT_THRESHOLD,
    cache: MutualInfoCache | None = None,
    trace: Cbl1Trace | None = None,
) -> LearnedStructure:
    feats = _check_features(ds)
    c = ds.class_index
    ordering = _ordering(ds, feats)
    sub = cbl1(ds, feats, ordering, t, aug=c, cache=cache, trace=trace)
    dag = Dag.empty(ordering)
    for f in feats:
        dag = dag.add_arc(c, f)
    for i, j in sub.arcs:
        dag = dag.add_arc(i, j)
    return LearnedStructure(dag, c, frozenset(feats), "ban", _eps(t))


def learn_gbn(
    ds: Dataset,
    t: MiThreshold | float = DEFAULT_THRESHOLD,
    cache: MutualInfoCache | None = None,
    trace: Cbl1Trace | None = None,
) -> LearnedStructure:
    feats = _check_features(ds)
    c = ds.class_index
    ordering = _ordering(ds, feats)
    full = cbl1(ds, ordering.order, ordering, t, cache=cache, trace=trace)
    blanket = markov_blanket(full, c)
    return LearnedStructure(full.induced(blanket | {c}), c, frozenset(blanket), "gbn", _eps(t))


def _eps(t) -> float:
    return t.epsilon if isinstance(t, MiThreshold) else float(t)


def learn(
    ds: Dataset,
    config: LearnerConfig | str,
    cache: MutualInfoCache | None = None,
) -> LearnedStructure:
    """Dispatch on the classifier kind."""
    if isinstance(config, str):
        config = LearnerConfig(config)
    if config.kind == "naive_bayes":
        return learn_naive_bayes(ds)
    if config.kind == "tan":
        return learn_tan(ds, cache)
    if config.kind == "ban":
        return learn_ban(ds, config.threshold, cache)
    return learn_gbn(ds, config.threshold, cache)
