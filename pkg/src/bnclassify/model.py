"""CPT fitting and exact class posteriors under complete evidence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import AttributeSchema, Dataset, DataError
from .graph import Dag, markov_blanket
from .learners import LearnedStructure

LOG_FLOOR = 1e-300


def _radix(cards: Sequence[int]) -> np.ndarray | None:
    """Mixed-radix weights (leftmost slowest), or None if codes overflow int64."""
    if float(np.prod([float(c) for c in cards])) >= 2.0**62:
        return None
    w = np.ones(len(cards), dtype=np.int64)
    for a in range(len(cards) - 2, -1, -1):
        w[a] = w[a + 1] * cards[a + 1]
    return w


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional table of one node, stored by parent configuration.

    ``configs`` holds the listed parent configurations (one row each, sorted
    lexicographically) and ``rows`` their distributions over the node's
    values; every configuration not listed uses ``default``. Fitted tables
    list only configurations seen in the data: under Laplace smoothing or
    plain frequencies an unseen configuration gets the uniform row anyway,
    so this is exact and keeps nodes with many parents cheap.
    """

    node: int
    parents: tuple[int, ...]
    cards: tuple[int, ...]
    configs: np.ndarray
    rows: np.ndarray
    default: np.ndarray
    _radix: np.ndarray | None = field(init=False, repr=False)
    _codes: np.ndarray | None = field(init=False, repr=False)
    _lookup: dict | None = field(init=False, repr=False)

    def __post_init__(self):
        parents = tuple(int(p) for p in self.parents)
        cards = tuple(int(c) for c in self.cards)
        if len(cards) != len(parents) + 1:
            raise ValueError("cards must list every parent and then the node")
        configs = np.asarray(self.configs, dtype=np.int64)
        configs = configs.reshape(len(configs) if configs.ndim == 2 else -1, len(parents))
        rows = np.asarray(self.rows, dtype=float).reshape(len(configs), cards[-1])
        default = np.asarray(self.default, dtype=float).reshape(cards[-1])
        for arr in (rows, default[None, :]):
            if (arr < 0).any() or not np.allclose(arr.sum(axis=-1), 1.0, atol=1e-9):
                raise ValueError(f"rows of the table for node {self.node} are not distributions")
        if len(configs) and ((configs < 0).any() or (configs >= np.asarray(cards[:-1])).any()):
            raise ValueError(f"parent configuration out of range in the table for node {self.node}")
        order = np.lexsort(configs.T[::-1]) if parents else np.arange(len(configs))
        configs, rows = configs[order], rows[order]
        if parents and len(configs) > 1 and (np.diff(configs, axis=0) == 0).all(axis=1).any():
            raise ValueError(f"repeated parent configuration in the table for node {self.node}")
        for arr in (configs, rows, default):
            arr.setflags(write=False)
        radix = _radix(cards[:-1])
        codes = configs @ radix if radix is not None else None
        lookup = None if radix is not None else {tuple(c): i for i, c in enumerate(configs.tolist())}
        for k, v in (("parents", parents), ("cards", cards), ("configs", configs), ("rows", rows),
                     ("default", default), ("_radix", radix), ("_codes", codes), ("_lookup", lookup)):
            object.__setattr__(self, k, v)

    @classmethod
    def dense(cls, node: int, parents: Sequence[int], table) -> "Cpt":
        """From a full table of shape ``(card(parent_1), ..., card(node))``."""
        table = np.asarray(table, dtype=float)
        if table.ndim != len(parents) + 1:
            raise ValueError("table rank does not match the parent count")
        k = table.shape[-1]
        n_configs = int(np.prod(table.shape[:-1], dtype=np.int64))
        configs = np.array(list(np.ndindex(*table.shape[:-1])), dtype=np.int64).reshape(n_configs, len(parents))
        return cls(node, tuple(parents), table.shape, configs, table.reshape(-1, k), np.full(k, 1.0 / k))

    @property
    def n_configs(self) -> int:
        """Number of parent configurations (listed or not)."""
        return int(np.prod(self.cards[:-1], dtype=float))

    @property
    def table(self) -> np.ndarray:
        """Full table; only for tables small enough to materialize."""
        if self.n_configs > 1 << 22:
            raise ValueError(f"table for node {self.node} is too large to materialize")
        out = np.empty(self.cards)
        out[...] = self.default
        flat = out.reshape(-1, self.cards[-1])
        if len(self.configs):
            flat[self.configs @ _radix(self.cards[:-1])] = self.rows
        return out

    def _find(self, configs: np.ndarray) -> np.ndarray:
        """Row index for each configuration, -1 where unlisted."""
        if self._codes is not None:
            codes = configs @ self._radix
            pos = np.searchsorted(self._codes, codes)
            pos = np.minimum(pos, max(len(self._codes) - 1, 0))
            hit = (self._codes[pos] == codes) if len(self._codes) else np.zeros(len(codes), dtype=bool)
            return np.where(hit, pos, -1)
        return np.array([self._lookup.get(tuple(c), -1) for c in configs.tolist()], dtype=np.int64)

    def distributions(self, parent_values: np.ndarray) -> np.ndarray:
        """``(n, k)`` node distributions for ``(n, n_parents)`` configurations."""
        parent_values = np.asarray(parent_values, dtype=np.int64)
        if parent_values.ndim == 1:
            parent_values = parent_values[None, :]
        idx = self._find(parent_values)
        out = np.empty((len(idx), self.cards[-1]))
        out[:] = self.default
        found = idx >= 0
        out[found] = self.rows[idx[found]]
        return out

    def row(self, config: Sequence[int]) -> np.ndarray:
        return self.distributions(np.asarray(config, dtype=np.int64)[None, :])[0]


@dataclass(frozen=True)
class Posterior:
    distribution: np.ndarray

    def argmax(self) -> int:
        return int(np.argmax(self.distribution))


@dataclass(frozen=True, eq=False)
class BayesNet:
    structure: LearnedStructure
    cpts: Mapping[int, Cpt]
    schema: tuple[AttributeSchema, ...]
    name: str = "classifier"
    _order: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        dag = self.structure.dag
        for n in dag.nodes:
            if n not in self.cpts:
                raise ValueError(f"missing table for node {n}")
            if tuple(self.cpts[n].parents) != tuple(dag.parents(n)):
                raise ValueError(f"table parents of node {n} do not match the graph")
        object.__setattr__(self, "_order", tuple(dag.nodes))

    @property
    def class_node(self) -> int:
        return self.structure.class_node

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._order

    @property
    def class_values(self) -> tuple[str, ...]:
        return self.schema[self.class_node].values


def fit_cpts(
    s: LearnedStructure, ds: Dataset, alpha: float = 1.0, name: str | None = None
) -> BayesNet:
    """Estimate every node's table from counts.

    ``alpha=0`` gives relative frequencies (unseen parent configurations get
    a uniform row); ``alpha>0`` adds ``alpha`` to every count (Laplace).
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    card = ds.cardinalities
    cpts = {}
    for n in s.dag.nodes:
        parents = tuple(s.dag.parents(n))
        k = int(card[n])
        y = ds.column(n)
        if parents:
            configs, inv = np.unique(ds.cases[:, list(parents)], axis=0, return_inverse=True)
            inv = inv.reshape(-1)
        else:
            configs, inv = np.zeros((1, 0), dtype=np.int64), np.zeros(len(y), dtype=np.int64)
        counts = np.bincount(inv * k + y, minlength=len(configs) * k).reshape(len(configs), k).astype(float)
        counts += alpha
        totals = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            rows = np.where(totals > 0, counts / np.where(totals > 0, totals, 1), 1.0 / k)
        cards = tuple(int(card[p]) for p in parents) + (k,)
        cpts[n] = Cpt(n, parents, cards, configs, rows, np.full(k, 1.0 / k))
    return BayesNet(s, cpts, ds.schema, name or ds.name or "classifier")


def _log_scores(bn: BayesNet, cases: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-class log joint scores and a flag for classes hit by a zero factor."""
    cases = np.asarray(cases, dtype=np.int64)
    if cases.ndim == 1:
        cases = cases[None, :]
    c = bn.class_node
    k = len(bn.class_values)
    scores = np.zeros((len(cases), k))
    zero = np.zeros((len(cases), k), dtype=bool)
    for n in bn.nodes:
        if n == c:
            continue
        values = cases[:, n]
        if (values < 0).any() or (values >= bn.schema[n].cardinality).any():
            raise DataError(f"value outside the categories of {bn.schema[n].name!r}")
    work = cases.copy()
    for cv in range(k):
        work[:, c] = cv
        for n in bn.nodes:
            cpt = bn.cpts[n]
            dist = cpt.distributions(work[:, list(cpt.parents)])
            p = dist[np.arange(len(work)), work[:, n]]
            zero[:, cv] |= p == 0
            scores[:, cv] += np.log(np.maximum(p, LOG_FLOOR))
    return scores, zero


def posterior_batch(bn: BayesNet, cases: np.ndarray) -> np.ndarray:
    """Class posteriors for each row of a case matrix (one column per attribute)."""
    scores, zero = _log_scores(bn, cases)
    scores = scores - scores.max(axis=1, keepdims=True)
    p = np.exp(scores)
    p /= p.sum(axis=1, keepdims=True)
    all_zero = zero.all(axis=1)
    p[all_zero] = 1.0 / p.shape[1]
    return p


def posterior(bn: BayesNet, instance: Sequence[int]) -> Posterior:
    """Exact ``P(class | instance)`` from the product of all factors."""
    return Posterior(posterior_batch(bn, np.asarray(instance)[None, :])[0])


def predict_batch(bn: BayesNet, cases: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum: ties go to the lowest class index
    return np.argmax(posterior_batch(bn, cases), axis=1)


def predict(bn: BayesNet, instance: Sequence[int]) -> int:
    """Index of the most probable class value (lowest index on ties)."""
    return int(predict_batch(bn, np.asarray(instance)[None, :])[0])


def prune_to_blanket(bn: BayesNet) -> BayesNet:
    """Drop every node outside the class's Markov blanket.

    The class's table and its children's tables are kept verbatim, so the
    class posterior is unchanged. A spouse that loses parents gets its table
    averaged over the removed parents' configurations; that factor does not
    involve the class, so its exact values do not matter for classification.
    """
    dag = bn.structure.dag
    c = bn.class_node
    keep = markov_blanket(dag, c) | {c}
    sub = dag.induced(keep)
    cpts = {}
    for n in sub.nodes:
        old = bn.cpts[n]
        new_parents = tuple(sub.parents(n))
        if new_parents == old.parents:
            cpts[n] = old
            continue
        cpts[n] = _marginalize_parents(old, new_parents)
    s = LearnedStructure(sub, c, frozenset(keep - {c}), bn.structure.kind, bn.structure.threshold)
    return BayesNet(s, cpts, bn.schema, bn.name)


def _marginalize_parents(cpt: Cpt, kept: tuple[int, ...]) -> Cpt:
    """Average ``cpt``'s rows uniformly over the parents not in ``kept``."""
    pos = [cpt.parents.index(p) for p in kept]
    drop = [a for a, p in enumerate(cpt.parents) if p not in kept]
    n_dropped = float(np.prod([cpt.cards[a] for a in drop], dtype=float))
    k = cpt.cards[-1]
    if kept:
        configs, inv = np.unique(cpt.configs[:, pos], axis=0, return_inverse=True)
        inv = inv.reshape(-1)
    else:
        configs, inv = np.zeros((1, 0), dtype=np.int64), np.zeros(len(cpt.configs), dtype=np.int64)
    sums = np.zeros((len(configs), k))
    np.add.at(sums, inv, cpt.rows)
    seen = np.bincount(inv, minlength=len(configs)).astype(float)
    rows = (sums + (n_dropped - seen)[:, None] * cpt.default) / n_dropped
    rows /= rows.sum(axis=1, keepdims=True)
    cards = tuple(cpt.cards[a] for a in pos) + (k,)
    return Cpt(cpt.node, kept, cards, configs, rows, cpt.default)


def net_from_tables(
    dag: Dag,
    class_node: int,
    tables: Mapping[int, np.ndarray],
    schema: Sequence[AttributeSchema],
    kind: str = "gbn",
    name: str = "classifier",
) -> BayesNet:
    """Assemble a net from explicit tables (parents taken from ``dag``)."""
    cpts = {n: Cpt.dense(n, tuple(dag.parents(n)), tables[n]) for n in dag.nodes}
    retained = frozenset(n for n in dag.nodes if n != class_node)
    return BayesNet(LearnedStructure(dag, class_node, retained, kind), cpts, tuple(schema), name)
