"""Ordered DAGs: acyclic by construction, plus the skeleton queries used by
the CI-based learners."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class NodeOrdering:
    order: tuple[int, ...]
    position: Mapping[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = tuple(self.order)
        if len(set(order)) != len(order):
            raise GraphError("node ordering repeats a node")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "position", {n: r for r, n in enumerate(order)})

    @classmethod
    def classifier(cls, class_node: int, nodes: Iterable[int]) -> "NodeOrdering":
        """Class node first, the others in ascending id (i.e. column) order."""
        rest = sorted(n for n in nodes if n != class_node)
        return cls((class_node, *rest))

    def rank(self, n: int) -> int:
        try:
            return self.position[n]
        except KeyError:
            raise GraphError(f"unknown node {n}") from None

    def restrict(self, nodes: Iterable[int]) -> "NodeOrdering":
        keep = set(nodes)
        return NodeOrdering(tuple(n for n in self.order if n in keep))


@dataclass(frozen=True)
class Dag:
    """Immutable DAG whose arcs always point from lower to higher rank.

    Arcs are kept in insertion order; ``add_arc``/``remove_arc`` return new
    graphs.
    """

    ordering: NodeOrdering
    arcs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def empty(cls, ordering: NodeOrdering | Sequence[int]) -> "Dag":
        if not isinstance(ordering, NodeOrdering):
            ordering = NodeOrdering(tuple(ordering))
        return cls(ordering)

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.ordering.order

    @cached_property
    def arc_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.arcs)

    @cached_property
    def _parents(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self.nodes}
        for p, c in self.arcs:
            out[c].append(p)
        return out

    @cached_property
    def _children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self.nodes}
        for p, c in self.arcs:
            out[p].append(c)
        return out

    def parents(self, n: int) -> list[int]:
        """Parents of ``n`` sorted by rank."""
        self._check(n)
        return sorted(self._parents[n], key=self.ordering.rank)

    def children(self, n: int) -> list[int]:
        self._check(n)
        return sorted(self._children[n], key=self.ordering.rank)

    def neighbors(self, n: int) -> set[int]:
        self._check(n)
        return set(self._parents[n]) | set(self._children[n])

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.arc_set or (b, a) in self.arc_set

    def _check(self, n: int):
        if n not in self.ordering.position:
            raise GraphError(f"unknown node {n}")

    def _orient(self, a: int, b: int) -> tuple[int, int]:
        self._check(a)
        self._check(b)
        if a == b:
            raise GraphError("self-loops are not allowed")
        return (a, b) if self.ordering.rank(a) < self.ordering.rank(b) else (b, a)

    def add_arc(self, a: int, b: int) -> "Dag":
        return add_arc(self, a, b)

    def remove_arc(self, a: int, b: int) -> "Dag":
        arc = self._orient(a, b)
        if arc not in self.arc_set:
            raise GraphError(f"no arc between {a} and {b}")
        return Dag(self.ordering, tuple(x for x in self.arcs if x != arc))

    def induced(self, nodes: Iterable[int]) -> "Dag":
        """Subgraph on ``nodes`` (arcs with an endpoint outside are dropped)."""
        keep = set(nodes)
        return Dag(
            self.ordering.restrict(keep),
            tuple((p, c) for p, c in self.arcs if p in keep and c in keep),
        )

    def topological_order(self) -> list[int]:
        return list(self.nodes)


def add_arc(g: Dag, a: int, b: int) -> Dag:
    """Add the edge ``a - b``, oriented from the lower- to the higher-rank node."""
    arc = g._orient(a, b)
    if arc in g.arc_set:
        raise GraphError(f"arc {arc} already present")
    return Dag(g.ordering, g.arcs + (arc,))


def _reachable(g: Dag, start: int, blocked: Iterable[int] = ()) -> set[int]:
    seen = set(blocked)
    seen.add(start)
    queue = deque([start])
    reached = {start}
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                reached.add(v)
                queue.append(v)
    return reached


def adjacency_path_exists(g: Dag, a: int, b: int) -> bool:
    """True iff ``a`` and ``b`` are connected in the undirected skeleton."""
    g._check(a)
    g._check(b)
    return b in _reachable(g, a)


def markov_blanket(g: Dag, n: int) -> set[int]:
    """Parents, children and the children's other parents of ``n``."""
    g._check(n)
    blanket = set(g._parents[n]) | set(g._children[n])
    for c in g._children[n]:
        blanket.update(g._parents[c])
    blanket.discard(n)
    return blanket


def cut_set(g: Dag, a: int, b: int) -> set[int]:
    """Candidate separating set for ``a`` and ``b`` (any ``a - b`` edge ignored).

    Takes the neighbours of ``a`` that lie on some skeleton path to ``b`` and
    the matching neighbours of ``b``; returns the smaller of the two sets,
    ``a``'s on ties.
    """
    if a == b:
        raise GraphError("cut set needs two distinct nodes")
    if g.has_edge(a, b):
        g = g.remove_arc(a, b)

    def side(u: int, v: int) -> set[int]:
        reach_v = _reachable(g, v, blocked=(u,))
        return {w for w in g.neighbors(u) if w in reach_v}

    za, zb = side(a, b), side(b, a)
    return za if len(za) <= len(zb) else zb


def to_edgelist(g: Dag, names: Sequence[str] | None = None) -> str:
    """One ``parent -> child`` line per arc, in insertion order."""
    label = (lambda n: names[n]) if names is not None else str
    return "".join(f"{label(p)} -> {label(c)}\n" for p, c in g.arcs)
