"""Brute-force reference implementations used as test oracles.

None of these share code with the library: counts come from plain
dictionaries, trees from exhaustive enumeration, posteriors from the full
joint table.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from bnclassify.data import AttributeSchema, Dataset


def make_dataset(columns, class_index=0, cards=None) -> Dataset:
    """Dataset from integer columns; category labels are ``"v0", "v1", ...``."""
    cases = np.column_stack([np.asarray(c, dtype=np.int64) for c in columns])
    if cards is None:
        cards = [int(cases[:, a].max()) + 1 for a in range(cases.shape[1])]
    schema = tuple(
        AttributeSchema(f"x{a}", values=tuple(f"v{k}" for k in range(max(cards[a], 1))))
        for a in range(cases.shape[1])
    )
    return Dataset(schema, class_index, cases)


def cmi_bruteforce(rows, i, j, z=()) -> float:
    """I(i; j | z) in bits from dictionary counts over row tuples."""
    n = len(rows)
    nxyz = Counter((r[i], r[j], tuple(r[k] for k in z)) for r in rows)
    nxz = Counter((r[i], tuple(r[k] for k in z)) for r in rows)
    nyz = Counter((r[j], tuple(r[k] for k in z)) for r in rows)
    nz = Counter(tuple(r[k] for k in z) for r in rows)
    total = 0.0
    for (x, y, zz), c in nxyz.items():
        total += c / n * math.log2(c * nz[zz] / (nxz[(x, zz)] * nyz[(y, zz)]))
    return max(total, 0.0)


def entropy_bruteforce(values) -> float:
    n = len(values)
    return -sum(c / n * math.log2(c / n) for c in Counter(values).values())


def spanning_trees(nodes):
    """Every spanning tree of the complete graph on ``nodes`` (as edge tuples)."""
    nodes = list(nodes)
    edges = list(itertools.combinations(nodes, 2))
    for subset in itertools.combinations(edges, len(nodes) - 1):
        root = {n: n for n in nodes}

        def find(x):
            while root[x] != x:
                x = root[x]
            return x

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            root[ra] = rb
        if ok:
            yield subset


def max_spanning_weight(nodes, weight) -> float:
    nodes = list(nodes)
    if len(nodes) < 2:
        return 0.0
    return max(math.fsum(weight[e] for e in t) for t in spanning_trees(nodes))


def min_vertex_cut(adj: dict, a, b) -> int:
    """Size of the smallest vertex set (excluding a, b) separating a from b."""
    others = [n for n in adj if n not in (a, b)]

    def connected(removed):
        seen, stack = {a}, [a]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v in removed or v in seen:
                    continue
                if v == b:
                    return True
                seen.add(v)
                stack.append(v)
        return False

    for size in range(len(others) + 1):
        for cut in itertools.combinations(others, size):
            if not connected(set(cut)):
                return size
    raise AssertionError("a and b are adjacent")


def joint_posterior(parents: dict, tables: dict, cards: list, class_node: int, evidence) -> np.ndarray:
    """P(class | all other nodes) by enumerating the full joint table.

    ``tables[n]`` is indexed ``[*parent_values, value]``.
    """
    n_nodes = len(cards)
    weights = np.zeros(cards[class_node])
    for assignment in itertools.product(*(range(c) for c in cards)):
        if any(assignment[v] != evidence[v] for v in range(n_nodes) if v != class_node):
            continue
        p = 1.0
        for v in range(n_nodes):
            idx = tuple(assignment[q] for q in parents[v]) + (assignment[v],)
            p *= tables[v][idx]
        weights[assignment[class_node]] += p
    total = weights.sum()
    if total == 0:
        return np.full(len(weights), 1.0 / len(weights))
    return weights / total


def evidence_probability(parents: dict, tables: dict, cards: list, class_node: int, evidence) -> float:
    """P(all non-class nodes = evidence), summing the joint over the class."""
    total = 0.0
    for y in range(cards[class_node]):
        full = list(evidence)
        full[class_node] = y
        p = 1.0
        for v in range(len(cards)):
            p *= tables[v][tuple(full[q] for q in parents[v]) + (full[v],)]
        total += p
    return total


def random_dag(rng, n_nodes: int, p_edge: float = 0.5) -> dict:
    """Parent lists of a random DAG whose arcs go from lower to higher id."""
    return {v: [u for u in range(v) if rng.random() < p_edge] for v in range(n_nodes)}


def random_tables(rng, parents: dict, cards: list, zero_prob: float = 0.0) -> dict:
    tables = {}
    for v, ps in parents.items():
        shape = tuple(cards[p] for p in ps) + (cards[v],)
        t = rng.dirichlet(np.ones(cards[v]), size=int(np.prod(shape[:-1]))).reshape(shape)
        if zero_prob:
            mask = rng.random(shape) < zero_prob
            t = np.where(mask, 0.0, t)
            dead = t.sum(axis=-1) == 0
            t[dead] = 1.0 / cards[v]
            t = t / t.sum(axis=-1, keepdims=True)
        tables[v] = t
    return tables


def forward_sample(rng, parents: dict, tables: dict, cards: list, n: int) -> np.ndarray:
    """Ancestral sampling; node ids must be a topological order."""
    out = np.zeros((n, len(cards)), dtype=np.int64)
    for v in range(len(cards)):
        probs = tables[v][tuple(out[:, p] for p in parents[v])] if parents[v] else np.broadcast_to(
            tables[v], (n, cards[v])
        )
        cum = np.cumsum(probs, axis=1)
        u = rng.random((n, 1))
        out[:, v] = np.minimum((u > cum).sum(axis=1), cards[v] - 1)
    return out
