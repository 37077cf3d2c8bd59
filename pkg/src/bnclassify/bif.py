"""BIF 0.15 reading and writing for discrete classifier networks.

Supported grammar subset::

    network "name" {
      property "class = <variable>" ;
      property "kind = <kind>" ;
      property "threshold = <float>" ;      // optional
    }
    variable "x" {
      type discrete [ k ] { v1, ..., vk };
      property "cuts = c1, ..., c(k-1)" ;   // optional, discretized attributes
    }
    probability ( "x" ) {
      table p1, ..., pk;
    }
    probability ( "x" | "a", "b" ) {
      ( a_1, b_1 ) p1, ..., pk;            // one row per parent configuration,
      ...                                   // leftmost parent varying slowest
    }
    probability ( "y" | "a", "b", ... ) {  // more than FULL_ROWS configurations:
      ( a_3, b_1, ... ) p1, ..., pk;       // only the listed configurations,
      default p1, ..., pk;                 // every other one uses this row
    }

Names and values are written bare when they are plain words and
double-quoted otherwise. Numbers use Python's shortest round-trip repr, so
export -> parse -> export reproduces the text byte for byte.
"""

from __future__ import annotations

import itertools
import re

import numpy as np

from .data import CATEGORICAL, AttributeSchema
from .graph import Dag, NodeOrdering
from .learners import LearnedStructure
from .model import BayesNet, Cpt

_BARE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")
_TOKEN = re.compile(r'\s*(?:(//[^\n]*)|"((?:[^"\\]|\\.)*)"|([{}()\[\];,|])|([^\s{}()\[\];,|"]+))')


FULL_ROWS = 4096

_KEYWORDS = ("variable", "probability", "network", "table", "type", "discrete", "property", "default")


class BifError(ValueError):
    pass


def _q(text: str) -> str:
    if _BARE.match(text) and text not in _KEYWORDS:
        return text
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _num(x: float) -> str:
    return repr(float(x))


def export_bif(bn: BayesNet) -> str:
    """Serialize a fitted classifier; output is deterministic."""
    dag = bn.structure.dag
    names = [a.name for a in bn.schema]
    lines = [f"network {_q(bn.name)} {{"]
    lines.append(f'  property "class = {names[bn.class_node]}" ;')
    lines.append(f'  property "kind = {bn.structure.kind}" ;')
    if bn.structure.threshold is not None:
        lines.append(f'  property "threshold = {_num(bn.structure.threshold)}" ;')
    lines.append("}")
    for n in dag.nodes:
        values = bn.schema[n].values
        lines.append(f"variable {_q(names[n])} {{")
        lines.append(
            f"  type discrete [ {len(values)} ] {{ {', '.join(_q(v) for v in values)} }};"
        )
        cuts = bn.schema[n].cut_points
        if cuts is not None:
            lines.append(f'  property "cuts = {", ".join(_num(c) for c in cuts)}" ;')
        lines.append("}")
    for n in dag.nodes:
        cpt = bn.cpts[n]
        head = _q(names[n])
        if cpt.parents:
            head += " | " + ", ".join(_q(names[p]) for p in cpt.parents)
        lines.append(f"probability ( {head} ) {{")
        if not cpt.parents:
            lines.append(f"  table {', '.join(_num(p) for p in cpt.table)};")
        else:
            if cpt.n_configs <= FULL_ROWS:
                table = cpt.table
                ranges = [range(c) for c in cpt.cards[:-1]]
                listed = [(config, table[config]) for config in itertools.product(*ranges)]
            else:
                listed = [(tuple(c), r) for c, r in zip(cpt.configs.tolist(), cpt.rows)]
            for config, dist in listed:
                labels = ", ".join(_q(bn.schema[p].values[v]) for p, v in zip(cpt.parents, config))
                lines.append(f"  ( {labels} ) {', '.join(_num(p) for p in dist)};")
            if cpt.n_configs > FULL_ROWS:
                lines.append(f"  default {', '.join(_num(p) for p in cpt.default)};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def _tokenize(text: str) -> list[tuple[str, int, bool]]:
    """``(token, line, quoted)`` triples, comments dropped."""
    out = []
    pos, line = 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise BifError(f"line {line}: cannot tokenize near {text[pos:pos + 20]!r}")
            break
        line += text.count("\n", pos, m.start(m.lastindex))
        if m.group(2) is not None:
            out.append((re.sub(r"\\(.)", r"\1", m.group(2)), line, True))
        elif m.group(3) is not None:
            out.append((m.group(3), line, False))
        elif m.group(4) is not None:
            out.append((m.group(4), line, False))
        line += text.count("\n", m.start(m.lastindex), m.end())
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, self._last_line(), False)

    def _last_line(self):
        return self.toks[-1][1] if self.toks else 1

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise BifError(f"line {tok[1]}: unexpected end of input")
        self.i += 1
        return tok

    def expect(self, value: str):
        tok, line, quoted = self.next()
        if tok != value or quoted:
            raise BifError(f"line {line}: expected {value!r}, found {tok!r}")
        return line

    def word(self) -> str:
        tok, line, quoted = self.next()
        if not quoted and tok in "{}()[];,|":
            raise BifError(f"line {line}: expected a name, found {tok!r}")
        return tok

    def word_list(self, close: str) -> list[str]:
        items = [self.word()]
        while self.peek()[0] == ",":
            self.next()
            items.append(self.word())
        self.expect(close)
        return items

    def number(self) -> float:
        tok, line, _ = self.next()
        try:
            return float(tok)
        except ValueError:
            raise BifError(f"line {line}: expected a number, found {tok!r}") from None

    def numbers(self) -> list[float]:
        vals = [self.number()]
        while self.peek()[0] == ",":
            self.next()
            vals.append(self.number())
        self.expect(";")
        return vals


def parse_bif(text: str) -> BayesNet:
    """Parse the supported BIF subset back into a :class:`BayesNet`."""
    p = _Parser(text)
    net_name, props = "classifier", {}
    variables: dict[str, tuple[list[str], int]] = {}
    cuts: dict[str, tuple[float, ...]] = {}
    blocks = []
    while p.peek()[0] is not None:
        kw, line, _ = p.next()
        if kw == "network":
            net_name = p.word()
            p.expect("{")
            while p.peek()[0] != "}":
                prop_line = p.expect("property")
                body = p.word()
                p.expect(";")
                if "=" in body:
                    k, v = (s.strip() for s in body.split("=", 1))
                    props[k] = v
                else:
                    raise BifError(f"line {prop_line}: property without '='")
            p.expect("}")
        elif kw == "variable":
            name = p.word()
            p.expect("{")
            p.expect("type")
            p.expect("discrete")
            p.expect("[")
            k = int(p.number())
            p.expect("]")
            p.expect("{")
            values = p.word_list("}")
            p.expect(";")
            while p.peek()[0] == "property":
                p.next()
                body = p.word()
                p.expect(";")
                key, _, rest = body.partition("=")
                if key.strip() == "cuts":
                    try:
                        cuts[name] = tuple(float(c) for c in rest.split(",") if c.strip())
                    except ValueError:
                        raise BifError(f"line {line}: bad cut points for {name!r}") from None
            p.expect("}")
            if len(values) != k:
                raise BifError(f"line {line}: variable {name!r} declares {k} values, lists {len(values)}")
            variables[name] = (values, line)
        elif kw == "probability":
            p.expect("(")
            child = p.word()
            parents = []
            if p.peek()[0] == "|":
                p.next()
                parents = p.word_list(")")
            else:
                p.expect(")")
            p.expect("{")
            rows = {}
            table = None
            default = None
            while p.peek()[0] != "}":
                tok, rline, quoted = p.peek()
                if tok == "table" and not quoted:
                    p.next()
                    table = (p.numbers(), rline)
                elif tok == "default" and not quoted:
                    p.next()
                    default = (p.numbers(), rline)
                elif tok == "(":
                    p.next()
                    config = tuple(p.word_list(")"))
                    if config in rows:
                        raise BifError(f"line {rline}: repeated parent configuration {config!r}")
                    rows[config] = (p.numbers(), rline)
                else:
                    raise BifError(f"line {rline}: unexpected {tok!r} in probability block")
            p.expect("}")
            blocks.append((child, parents, rows, table, default, line))
        else:
            raise BifError(f"line {line}: unexpected {kw!r}")

    if "class" not in props:
        raise BifError("network block lacks the 'class = <variable>' property")
    # probability-block order fixes node ids, so variable blocks may come in any order
    names = [b[0] for b in blocks]
    if len(set(names)) != len(names):
        raise BifError("a variable has two probability blocks")
    for n, (_, vline) in variables.items():
        if n not in set(names):
            raise BifError(f"line {vline}: variable {n!r} has no probability block")
    for child, _, _, _, _, bline in blocks:
        if child not in variables:
            raise BifError(f"line {bline}: probability block for undeclared variable {child!r}")
    index = {n: i for i, n in enumerate(names)}
    class_name = props["class"]
    if class_name not in index:
        raise BifError(f"class variable {class_name!r} is not declared")
    schema = tuple(
        AttributeSchema(n, CATEGORICAL, tuple(variables[n][0]), cut_points=cuts.get(n)) for n in names
    )

    arcs = []
    cpts = {}
    for child, parents, rows, table, default, line in blocks:
        for v in parents:
            if v not in index:
                raise BifError(f"line {line}: probability block references undeclared variable {v!r}")
        if len(set(parents)) != len(parents) or child in parents:
            raise BifError(f"line {line}: repeated variable in the parent list of {child!r}")
        node = index[child]
        k = len(variables[child][0])
        pidx = tuple(index[q] for q in parents)
        cards = tuple(len(variables[q][0]) for q in parents) + (k,)

        def check(vals, rline):
            vals = np.asarray(vals, dtype=float)
            if len(vals) != k:
                raise BifError(f"line {rline}: row length {len(vals)} != {k} values of {child!r}")
            if (vals < 0).any() or abs(vals.sum() - 1.0) > 1e-6:
                raise BifError(f"line {rline}: row of probability block for {child!r} does not sum to 1")
            return vals

        if not parents:
            if table is None:
                raise BifError(f"line {line}: probability block for {child!r} has no table")
            dist = check(*table)
            configs, dists, fallback = np.zeros((1, 0), dtype=np.int64), dist[None, :], dist
        else:
            if table is not None:
                raise BifError(f"line {table[1]}: 'table' in a block with parents")
            lookups = [{v: i for i, v in enumerate(variables[q][0])} for q in parents]
            configs, dists = [], []
            for config, (vals, rline) in rows.items():
                if len(config) != len(parents):
                    raise BifError(f"line {rline}: configuration size does not match the parents of {child!r}")
                try:
                    configs.append([lk[v] for lk, v in zip(lookups, config)])
                except KeyError as e:
                    raise BifError(f"line {rline}: unknown parent value {e.args[0]!r}") from None
                dists.append(check(vals, rline))
            n_configs = int(np.prod(cards[:-1], dtype=float))
            if default is not None:
                fallback = check(*default)
            elif len(rows) != n_configs:
                raise BifError(f"line {line}: probability block for {child!r} does not cover every parent configuration")
            else:
                fallback = np.full(k, 1.0 / k)
            configs = np.array(configs, dtype=np.int64).reshape(-1, len(parents))
            dists = np.array(dists, dtype=float).reshape(-1, k)
        cpts[node] = (pidx, cards, configs, dists, fallback)
        arcs.extend((q, node) for q in pidx)

    # rank nodes so that every arc points forward, class first
    c = index[class_name]
    order = _topological(list(range(len(names))), arcs, first=c)
    ordering = NodeOrdering(tuple(order))
    dag = Dag(ordering, tuple(sorted(arcs, key=lambda a: (ordering.rank(a[1]), ordering.rank(a[0])))))
    final = {}
    for n in dag.nodes:
        pidx, cards, configs, dists, fallback = cpts[n]
        want = tuple(dag.parents(n))
        perm = [pidx.index(q) for q in want]
        final[n] = Cpt(n, want, tuple(cards[a] for a in perm) + cards[-1:], configs[:, perm], dists, fallback)
    kind = props.get("kind", "gbn")
    thr = float(props["threshold"]) if "threshold" in props else None
    retained = frozenset(n for n in dag.nodes if n != c)
    s = LearnedStructure(dag, c, retained, kind, thr)
    return BayesNet(s, final, schema, net_name)


def _topological(nodes: list[int], arcs: list[tuple[int, int]], first: int) -> list[int]:
    parents = {n: set() for n in nodes}
    for a, b in arcs:
        parents[b].add(a)
    if parents[first]:
        # class with parents: it cannot be first; fall back to plain Kahn order
        first = None
    placed, order = set(), []
    if first is not None:
        order.append(first)
        placed.add(first)
    while len(order) < len(nodes):
        ready = [n for n in nodes if n not in placed and parents[n] <= placed]
        if not ready:
            raise BifError("the probability blocks describe a cyclic graph")
        order.append(ready[0])
        placed.add(ready[0])
    return order
