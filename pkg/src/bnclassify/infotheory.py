"""Plug-in entropy and (conditional) mutual information, in bits.

All quantities come from empirical contingency counts. Strata with zero
count contribute nothing; there is no smoothing here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .data import Dataset

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True)
class MiThreshold:
    """Minimum (conditional) mutual information, in bits, counted as dependence."""

    epsilon: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("threshold must be non-negative")

    def __float__(self):
        return float(self.epsilon)


@dataclass(frozen=True)
class PairScore:
    i: int
    j: int
    score: float


def _as_epsilon(t) -> float:
    return t.epsilon if isinstance(t, MiThreshold) else float(t)


def _encode(ds: Dataset, nodes: Iterable[int]) -> tuple[np.ndarray, int]:
    """Dense codes ``0..k-1`` for the joint configuration of ``nodes``."""
    nodes = sorted(nodes)
    if not nodes:
        return np.zeros(ds.n_cases, dtype=np.int64), 1
    card = ds.cardinalities
    code = np.zeros(ds.n_cases, dtype=np.int64)
    size = 1
    for v in nodes:
        code = code * card[v] + ds.column(v)
        size *= int(card[v])
        if size > 1 << 40:
            _, code = np.unique(code, return_inverse=True)
            size = int(code.max()) + 1
    if len(nodes) > 1:
        _, code = np.unique(code, return_inverse=True)
        size = int(code.max()) + 1
    return code.astype(np.int64), size


def entropy(ds: Dataset, i: int) -> float:
    """Empirical entropy of attribute ``i`` in bits."""
    if ds.n_cases == 0:
        raise ValueError("entropy of an empty dataset")
    counts = np.bincount(ds.column(i))
    p = counts[counts > 0] / ds.n_cases
    return float(-(p * np.log2(p)).sum())


def mutual_information(ds: Dataset, i: int, j: int) -> float:
    return conditional_mutual_information(ds, i, j, ())


def conditional_mutual_information(ds: Dataset, i: int, j: int, z: Iterable[int] = ()) -> float:
    """``I(i; j | z)`` in bits from the dataset's contingency counts."""
    z = frozenset(z)
    if i == j:
        raise ValueError("mutual information needs two distinct nodes")
    if i in z or j in z:
        raise ValueError("conditioning set must exclude the tested pair")
    if i > j:
        i, j = j, i
    n = ds.n_cases
    if n == 0:
        return 0.0
    card = ds.cardinalities
    ci, cj = int(card[i]), int(card[j])
    zc, nz = _encode(ds, z)
    cell = (zc * ci + ds.column(i)) * cj + ds.column(j)
    nxyz = np.bincount(cell, minlength=nz * ci * cj).reshape(nz, ci, cj).astype(float)
    nxz = nxyz.sum(axis=2, keepdims=True)
    nyz = nxyz.sum(axis=1, keepdims=True)
    nzz = nxz.sum(axis=1, keepdims=True)
    mask = nxyz > 0
    ratio = (nxyz * nzz)[mask] / (nxz * nyz)[mask]
    # the plug-in estimate is non-negative; only rounding can push it below 0
    return max(float((nxyz[mask] * np.log2(ratio)).sum() / n), 0.0)


def is_dependent(ds: Dataset, i: int, j: int, z: Iterable[int], t) -> bool:
    """Thresholded CI test: dependent iff the CMI exceeds ``t`` bits."""
    return conditional_mutual_information(ds, i, j, z) > _as_epsilon(t)


class MutualInfoCache:
    """Memoized CMI queries over one dataset.

    Results are keyed by the unordered pair and the conditioning set, so a
    cached and an uncached run return identical values. ``computed`` counts
    distinct evaluations; ``queries`` counts every request.
    """

    def __init__(self, ds: Dataset):
        self.ds = ds
        self._values: dict[tuple[int, int, frozenset], float] = {}
        self.queries = 0

    @property
    def computed(self) -> int:
        return len(self._values)

    def keys(self):
        return self._values.keys()

    def cmi(self, i: int, j: int, z: Iterable[int] = ()) -> float:
        self.queries += 1
        key = (min(i, j), max(i, j), frozenset(z))
        value = self._values.get(key)
        if value is None:
            value = self._values[key] = conditional_mutual_information(self.ds, i, j, key[2])
        return value

    def is_dependent(self, i: int, j: int, z: Iterable[int], t) -> bool:
        return self.cmi(i, j, z) > _as_epsilon(t)
