"""Categorical datasets: loading, discretization and partitioning.

Every attribute is stored as a column of small integer category indices.
Continuous columns are kept as float arrays until :func:`discretize`
turns them into interval categories.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

MISSING = "?"

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"


class DataError(ValueError):
    """Raised for malformed input files or invalid dataset operations."""


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str = CATEGORICAL
    values: tuple[str, ...] = ()
    ignored: bool = False
    cut_points: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, CONTINUOUS):
            raise DataError(f"unknown attribute kind {self.kind!r}")
        if len(set(self.values)) != len(self.values):
            raise DataError(f"duplicate category labels in attribute {self.name!r}")
        if self.kind == CATEGORICAL and not self.values:
            raise DataError(f"categorical attribute {self.name!r} has no values")

    @property
    def cardinality(self) -> int:
        return len(self.values)

    def index(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise DataError(f"value {label!r} is not a category of {self.name!r}") from None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of categorical cases.

    ``cases[r, a]`` is the category index of attribute ``a`` in row ``r``.
    Continuous attributes (before discretization) hold their raw numbers
    in ``continuous`` and a zero placeholder in ``cases``.
    """

    schema: tuple[AttributeSchema, ...]
    class_index: int
    cases: np.ndarray
    continuous: Mapping[int, np.ndarray] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        cases = np.asarray(self.cases, dtype=np.int64)
        if cases.ndim != 2 or cases.shape[1] != len(self.schema):
            raise DataError("case matrix does not match the schema width")
        cases.setflags(write=False)
        object.__setattr__(self, "cases", cases)
        if not 0 <= self.class_index < len(self.schema):
            raise DataError("class index out of range")
        cls = self.schema[self.class_index]
        if cls.kind != CATEGORICAL:
            raise DataError("the class attribute must be categorical")
        for a, att in enumerate(self.schema):
            if att.kind == CATEGORICAL and len(cases) and (
                cases[:, a].min() < 0 or cases[:, a].max() >= att.cardinality
            ):
                raise DataError(f"cell out of range in attribute {att.name!r}")

    @property
    def n_cases(self) -> int:
        return self.cases.shape[0]

    @property
    def n_attributes(self) -> int:
        return len(self.schema)

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.schema]

    @property
    def class_attribute(self) -> AttributeSchema:
        return self.schema[self.class_index]

    @property
    def features(self) -> list[int]:
        """Feature node ids in column order, skipping ignored attributes."""
        return [
            a for a, att in enumerate(self.schema) if a != self.class_index and not att.ignored
        ]

    @property
    def cardinalities(self) -> np.ndarray:
        return np.array([max(a.cardinality, 1) for a in self.schema], dtype=np.int64)

    def column(self, i: int) -> np.ndarray:
        return self.cases[:, i]

    def subset(self, rows: Sequence[int] | np.ndarray) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        cont = {a: v[rows] for a, v in self.continuous.items()}
        return Dataset(self.schema, self.class_index, self.cases[rows], cont, self.name)

    def with_schema(self, schema: Sequence[AttributeSchema]) -> "Dataset":
        """Swap in a schema whose category lists extend the current ones."""
        schema = tuple(schema)
        for old, new in zip(self.schema, schema):
            if new.values[: old.cardinality] != old.values:
                raise DataError(f"schema for {old.name!r} does not extend the current one")
        return replace(self, schema=schema)

    def same_schema(self, other: "Dataset") -> bool:
        return self.schema == other.schema and self.class_index == other.class_index

    def labels(self, i: int) -> list[str]:
        values = self.schema[i].values
        return [values[v] for v in self.cases[:, i]]


def _resolve_column(header: Sequence[str], column: str | int) -> int:
    if isinstance(column, (int, np.integer)):
        idx = int(column)
        if idx < 0:
            idx += len(header)
        if not 0 <= idx < len(header):
            raise DataError(f"class column {column} out of range")
        return idx
    if column not in header:
        raise DataError(f"class column {column!r} not found in header")
    return list(header).index(column)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(
    source,
    class_column: str | int = -1,
    missing_token: str = MISSING,
    delimiter: str = ",",
    header: Sequence[str] | None = None,
    continuous: Iterable[str | int] | str | None = None,
    schema: Sequence[AttributeSchema] | None = None,
    name: str = "",
) -> Dataset:
    """Read a delimiter-separated file into a :class:`Dataset`.

    Parameters
    ----------
    source : path, bytes or file-like
        The data. A header row is expected unless ``header`` is given.
    class_column : str or int
        Name or (possibly negative) index of the class column.
    missing_token : str
        Cells equal to this token (and empty cells) become the ``"?"`` category.
    continuous : iterable of names/indices, ``"auto"`` or None
        Columns to keep numeric for later discretization. ``"auto"`` marks
        every column whose non-missing cells all parse as numbers and which
        has more than ten distinct values.
    schema : sequence of AttributeSchema, optional
        Category lists to reuse (e.g. a training set's). Categories not yet
        listed are appended, so existing indices stay valid.
    """
    text = _read_text(source)
    rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if header is None:
        if not rows:
            raise DataError("empty file")
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    header = list(header)
    if not rows:
        raise DataError("file has no data rows")
    width = len(header)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"row {r + 1}: expected {width} fields, found {len(row)}")

    cls = _resolve_column(header, class_column)
    cells = [[c.strip() for c in row] for row in rows]
    missing = {missing_token, ""}

    if continuous == "auto":
        cont_cols = set()
        for a in range(width):
            if a == cls:
                continue
            col = [row[a] for row in cells if row[a] not in missing]
            if col and all(_is_number(c) for c in col) and len(set(col)) > 10:
                cont_cols.add(a)
    else:
        cont_cols = {_resolve_column(header, c) for c in (continuous or ())}
    if schema is not None:
        cont_cols |= {a for a, att in enumerate(schema) if att.kind == CONTINUOUS}
    if cls in cont_cols:
        raise DataError("the class column cannot be continuous")

    out_schema = []
    matrix = np.zeros((len(cells), width), dtype=np.int64)
    cont = {}
    for a in range(width):
        if a in cont_cols:
            vals = np.empty(len(cells))
            for r, row in enumerate(cells):
                c = row[a]
                if c in missing:
                    vals[r] = np.nan
                elif _is_number(c):
                    vals[r] = float(c)
                else:
                    raise DataError(f"row {r + 1}: non-numeric value {c!r} in continuous column {header[a]!r}")
            cont[a] = vals
            out_schema.append(AttributeSchema(header[a], CONTINUOUS))
            continue
        known = list(schema[a].values) if schema is not None else []
        lookup = {v: i for i, v in enumerate(known)}
        for r, row in enumerate(cells):
            c = MISSING if row[a] in missing else row[a]
            if a == cls and c == MISSING:
                raise DataError(f"row {r + 1}: missing class value")
            idx = lookup.get(c)
            if idx is None:
                idx = lookup[c] = len(known)
                known.append(c)
            matrix[r, a] = idx
        out_schema.append(AttributeSchema(header[a], CATEGORICAL, tuple(known)))
    ds = Dataset(tuple(out_schema), cls, matrix, cont, name)
    if ds.class_attribute.cardinality < 2 and schema is None:
        raise DataError("the class attribute needs at least two values")
    return ds


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, (str, Path)):
        return _read_path(Path(source))
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _read_path(path: Path) -> str:
    if path.suffix == ".gz":
        import gzip

        with gzip.open(path, "rt", encoding="utf-8") as f:
            return f.read()
    return path.read_text(encoding="utf-8")


def to_csv(ds: Dataset, delimiter: str = ",") -> str:
    """Serialize back to delimiter-separated text with a header row."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(ds.names)
    cols = []
    for a, att in enumerate(ds.schema):
        if att.kind == CONTINUOUS:
            cols.append([MISSING if np.isnan(v) else repr(float(v)) for v in ds.continuous[a]])
        else:
            cols.append(ds.labels(a))
    for r in range(ds.n_cases):
        w.writerow([c[r] for c in cols])
    return buf.getvalue()


def read_schema_sidecar(path) -> dict[str, str]:
    """Read ``name: kind`` lines (``#`` comments allowed) into a kind map."""
    kinds = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise DataError(f"schema line {n}: expected 'name: kind'")
        key, kind = (s.strip() for s in line.split(":", 1))
        if kind not in (CATEGORICAL, CONTINUOUS):
            raise DataError(f"schema line {n}: unknown kind {kind!r}")
        kinds[key] = kind
    return kinds


# -- discretization ---------------------------------------------------------


def _entropy_bits(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def _mdl_cuts(x: np.ndarray, y: np.ndarray, n_classes: int) -> list[float]:
    """Recursive minimum-entropy splitting with the MDL acceptance test."""
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    cuts: list[float] = []
    stack = [(0, len(x))]
    while stack:
        lo, hi = stack.pop()
        n = hi - lo
        if n < 2:
            continue
        xs, ys = x[lo:hi], y[lo:hi]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), ys] = 1
        left = np.cumsum(onehot, axis=0)[:-1]
        total = left[-1] + onehot[-1]
        right = total - left
        # candidate boundaries sit between distinct consecutive values
        valid = np.flatnonzero(xs[1:] != xs[:-1])
        if valid.size == 0:
            continue
        nl = left[valid].sum(axis=1)
        nr = n - nl

        def ent_rows(m):
            with np.errstate(divide="ignore", invalid="ignore"):
                p = m / m.sum(axis=1, keepdims=True)
                t = np.where(p > 0, p * np.log2(p), 0.0)
            return -t.sum(axis=1)

        e = (nl * ent_rows(left[valid]) + nr * ent_rows(right[valid])) / n
        best = int(np.argmin(e))
        k = valid[best] + 1
        ent_s = _entropy_bits(total)
        lc, rc = left[k - 1], right[k - 1]
        ent_l, ent_r = _entropy_bits(lc), _entropy_bits(rc)
        gain = ent_s - e[best]
        ks, kl, kr = (total > 0).sum(), (lc > 0).sum(), (rc > 0).sum()
        delta = math.log2(3**ks - 2) - (ks * ent_s - kl * ent_l - kr * ent_r)
        if gain <= (math.log2(n - 1) + delta) / n:
            continue
        cuts.append((xs[k - 1] + xs[k]) / 2.0)
        stack.append((lo, lo + k))
        stack.append((lo + k, hi))
    return sorted(cuts)


def _equal_frequency_cuts(x: np.ndarray, bins: int) -> list[float]:
    if bins < 2:
        return []
    xs = np.sort(x)
    cuts = []
    for q in range(1, bins):
        pos = q * len(xs) / bins
        i = int(math.ceil(pos)) - 1
        if 0 <= i < len(xs) - 1 and xs[i] != xs[i + 1]:
            cuts.append((xs[i] + xs[i + 1]) / 2.0)
    return sorted(set(cuts))


def _interval_labels(cuts: Sequence[float]) -> list[str]:
    fmt = "{:g}".format
    if len({fmt(c) for c in cuts}) != len(cuts):
        fmt = lambda c: repr(float(c))  # noqa: E731
    edges = ["-inf", *(fmt(c) for c in cuts), "inf"]
    labels = [f"[{lo},{hi})" for lo, hi in zip(edges[:-1], edges[1:])]
    labels[0] = "(" + labels[0][1:]
    return labels


def discretize(
    ds: Dataset,
    method: str = "entropy_mdl",
    bins: int = 5,
    cuts_from: Dataset | None = None,
) -> Dataset:
    """Replace every continuous attribute by interval categories.

    ``method`` is ``"entropy_mdl"`` (class-entropy splitting with the MDL
    stopping rule) or ``"equal_frequency"`` (``bins`` quantile intervals).
    An attribute left with no cut point is flagged ``ignored``. When
    ``cuts_from`` is given, its learned cut points are applied instead of
    fitting new ones (use it to discretize a test set like its training set).
    """
    if method not in ("entropy_mdl", "equal_frequency"):
        raise DataError(f"unknown discretization method {method!r}")
    if not ds.continuous:
        return ds
    y = ds.column(ds.class_index)
    n_classes = ds.class_attribute.cardinality
    schema = list(ds.schema)
    cases = ds.cases.copy()
    for a, x in sorted(ds.continuous.items()):
        present = ~np.isnan(x)
        if cuts_from is not None:
            ref = cuts_from.schema[a]
            if ref.cut_points is None:
                raise DataError(f"reference dataset has no cut points for {ref.name!r}")
            cuts = list(ref.cut_points)
        elif method == "entropy_mdl":
            cuts = _mdl_cuts(x[present], y[present], n_classes)
        else:
            cuts = _equal_frequency_cuts(x[present], bins)
        labels = _interval_labels(cuts)
        codes = np.searchsorted(np.asarray(cuts), np.where(present, x, 0.0), side="right")
        if not present.all():
            labels.append(MISSING)
            codes = np.where(present, codes, len(labels) - 1)
        cases[:, a] = codes
        schema[a] = AttributeSchema(
            ds.schema[a].name, CATEGORICAL, tuple(labels), ignored=not cuts, cut_points=tuple(cuts)
        )
    return Dataset(tuple(schema), ds.class_index, cases, {}, ds.name)


# -- partitioning -----------------------------------------------------------


def split_holdout(ds: Dataset, train_fraction: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split into ``ceil(f * n)`` training cases and the rest."""
    if not 0 < train_fraction < 1:
        raise DataError("train_fraction must lie strictly between 0 and 1")
    n = ds.n_cases
    if n < 2:
        raise DataError("need at least two cases to split")
    m = math.ceil(round(train_fraction * n, 9))
    m = min(max(m, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return ds.subset(np.sort(perm[:m])), ds.subset(np.sort(perm[m:]))


def cv_folds(ds: Dataset, k: int, seed: int = 0) -> list[tuple[Dataset, Dataset]]:
    """``k`` seeded (train, test) pairs whose test parts partition the cases."""
    if k < 2:
        raise DataError("cross validation needs k >= 2")
    if k > ds.n_cases:
        raise DataError(f"k={k} exceeds the number of cases ({ds.n_cases})")
    perm = np.random.default_rng(seed).permutation(ds.n_cases)
    folds = []
    for part in np.array_split(perm, k):
        mask = np.ones(ds.n_cases, dtype=bool)
        mask[part] = False
        folds.append((ds.subset(np.flatnonzero(mask)), ds.subset(np.sort(part))))
    return folds



def align_schemas(a: Dataset, b: Dataset) -> tuple[Dataset, Dataset]:
    """Give two categorical datasets one schema: ``a``'s categories first,
    then any extra categories seen only in ``b``."""
    if a.names != b.names or a.class_index != b.class_index:
        raise DataError("datasets have different columns")
    if a.continuous or b.continuous:
        raise DataError("discretize both datasets before aligning them")
    schema = []
    b_cases = b.cases.copy()
    for i, (sa, sb) in enumerate(zip(a.schema, b.schema)):
        values = list(sa.values)
        lookup = {v: k for k, v in enumerate(values)}
        remap = np.empty(max(sb.cardinality, 1), dtype=np.int64)
        for k, v in enumerate(sb.values):
            if v not in lookup:
                lookup[v] = len(values)
                values.append(v)
            remap[k] = lookup[v]
        if sb.cardinality:
            b_cases[:, i] = remap[b.cases[:, i]]
        schema.append(replace(sa, values=tuple(values)))
    schema = tuple(schema)
    return (
        Dataset(schema, a.class_index, a.cases, {}, a.name),
        Dataset(schema, b.class_index, b_cases, {}, b.name),
    )
