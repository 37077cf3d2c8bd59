"""Command-line front end: ``bnclassify {train,predict,eval,wrap,export}``.

Every failure is reported as one ``error: ...`` line on stderr with a
nonzero exit status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bif import export_bif, parse_bif
from .data import (
    CONTINUOUS,
    MISSING,
    DataError,
    Dataset,
    _read_text,
    align_schemas,
    discretize,
    load_csv,
    read_schema_sidecar,
)
from .evaluation import (
    WrapperConfig,
    accuracy_of,
    binomial_std,
    evaluate_cv,
    evaluate_holdout,
    format_report,
    train,
    wrapper_select,
)
from .graph import to_edgelist
from .learners import THRESHOLD_KINDS, normalize_kind
from .model import BayesNet, predict_batch

DISCRETIZERS = {"none": None, "mdl": "entropy_mdl", "equal-frequency": "equal_frequency"}


class CliError(Exception):
    pass


def _class_column(text: str) -> str | int:
    try:
        return int(text)
    except ValueError:
        return text


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(sorted(float(t) for t in text.split(",") if t.strip()))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold grid {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--threshold", type=float, default=None, help="CI-test threshold in bits (ban/gbn)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--smoothing", type=float, default=1.0, help="Laplace pseudo-count; 0 for frequencies")
    g.add_argument("--discretize", choices=sorted(DISCRETIZERS), default="none")
    g.add_argument("--bins", type=int, default=5, help="intervals for equal-frequency discretization")
    g.add_argument("--class-column", type=_class_column, default=-1, help="name or index (default: last)")
    g.add_argument("--missing-token", default=MISSING)
    g.add_argument("--delimiter", default=",")
    g.add_argument("--schema", default=None, help="sidecar file of 'name: categorical|continuous' lines")
    g.add_argument("--report-format", choices=("text", "json"), default="text")
    g.add_argument("-o", "--output", default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="bnclassify", description="Bayesian-network classifiers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="learn a classifier, write BIF")
    p.add_argument("data")
    p.add_argument("--kind", required=True)

    p = sub.add_parser("predict", parents=[common], help="label cases with a BIF model")
    p.add_argument("model")
    p.add_argument("data")

    p = sub.add_parser("eval", parents=[common], help="hold-out or cross-validated accuracy")
    p.add_argument("data")
    p.add_argument("test", nargs="?")
    p.add_argument("--kind", required=True)
    p.add_argument("--cv", type=int, default=None, metavar="K")

    p = sub.add_parser("wrap", parents=[common], help="threshold search over GBN and BAN")
    p.add_argument("data")
    p.add_argument("test", nargs="?", help="optional test set to score the selected model on")
    p.add_argument("--grid", type=_grid, default=None)
    p.add_argument("--model-output", default=None, help="where to write the selected model's BIF")

    p = sub.add_parser("export", parents=[common], help="describe a BIF model")
    p.add_argument("model")
    return parser


# -- loading ---------------------------------------------------------------


def _continuous_spec(args):
    if args.schema:
        kinds = read_schema_sidecar(args.schema)
        return [n for n, k in kinds.items() if k == CONTINUOUS]
    return "auto" if args.discretize != "none" else None


def _finish(ds: Dataset, args) -> Dataset:
    if ds.continuous:
        if args.discretize == "none":
            names = ", ".join(ds.schema[a].name for a in sorted(ds.continuous))
            raise CliError(f"continuous columns need --discretize: {names}")
        ds = discretize(ds, DISCRETIZERS[args.discretize], args.bins)
    return ds


def _load(path: str, args) -> Dataset:
    return _finish(
        load_csv(
            path,
            class_column=args.class_column,
            missing_token=args.missing_token,
            delimiter=args.delimiter,
            continuous=_continuous_spec(args),
            name=Path(path).name.split(".")[0],
        ),
        args,
    )


def _load_pair(train_path: str, test_path: str, args) -> tuple[Dataset, Dataset]:
    """Training and test sets sharing one schema and one set of cut points."""
    raw_train = load_csv(
        train_path,
        class_column=args.class_column,
        missing_token=args.missing_token,
        delimiter=args.delimiter,
        continuous=_continuous_spec(args),
        name=Path(train_path).name.split(".")[0],
    )
    raw_test = load_csv(
        test_path,
        class_column=args.class_column,
        missing_token=args.missing_token,
        delimiter=args.delimiter,
        continuous=sorted(raw_train.continuous),
    )
    if raw_test.names != raw_train.names:
        raise CliError("training and test files have different columns")
    tr = _finish(raw_train, args)
    te = discretize(raw_test, cuts_from=tr) if raw_test.continuous else raw_test
    return align_schemas(tr, te)


def cases_for_net(bn: BayesNet, text: str, delimiter: str = ",", missing_token: str = MISSING) -> np.ndarray:
    """Encode a CSV (with header) into the net's attribute indices by column name.

    Columns with stored cut points are read as numbers and binned; the class
    column may be absent. Unknown categories are an error.
    """
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty file")
    header = [c.strip() for c in rows[0]]
    rows = rows[1:]
    col = {n: i for i, n in enumerate(header)}
    cases = np.zeros((len(rows), len(bn.schema)), dtype=np.int64)
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"row {r + 1}: expected {len(header)} fields, found {len(row)}")
    for n in bn.nodes:
        if n == bn.class_node:
            continue
        att = bn.schema[n]
        if att.name not in col:
            raise DataError(f"column {att.name!r} required by the model is missing")
        a = col[att.name]
        lookup = {v: k for k, v in enumerate(att.values)}
        cuts = np.asarray(att.cut_points) if att.cut_points is not None else None
        for r, row in enumerate(rows):
            cell = row[a].strip()
            if cell in (missing_token, ""):
                cell = MISSING
            if cuts is not None and cell != MISSING:
                try:
                    cases[r, n] = int(np.searchsorted(cuts, float(cell), side="right"))
                except ValueError:
                    raise DataError(f"row {r + 1}: non-numeric value {cell!r} in {att.name!r}") from None
                continue
            if cell not in lookup:
                raise DataError(f"row {r + 1}: unknown value {cell!r} for {att.name!r}")
            cases[r, n] = lookup[cell]
    return cases


# -- subcommands -------------------------------------------------------------


def _write(text: str, path: str | None, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text)


def _kind_threshold(args) -> tuple[str, float | None]:
    kind = normalize_kind(args.kind)
    if kind not in THRESHOLD_KINDS and args.threshold is not None:
        raise CliError(f"--threshold does not apply to {kind}")
    return kind, args.threshold


def cmd_train(args, out) -> int:
    kind, thr = _kind_threshold(args)
    ds = _load(args.data, args)
    bn = train(kind, ds, thr, args.smoothing)
    _write(export_bif(bn), args.output, out)
    return 0


def _read_model(path: str) -> BayesNet:
    return parse_bif(Path(path).read_text(encoding="utf-8"))


def cmd_predict(args, out) -> int:
    bn = _read_model(args.model)
    cases = cases_for_net(bn, _read_text(args.data), args.delimiter, args.missing_token)
    labels = bn.class_values
    text = "".join(labels[k] + "\n" for k in predict_batch(bn, cases))
    _write(text, args.output, out)
    return 0


def cmd_eval(args, out) -> int:
    kind, thr = _kind_threshold(args)
    if (args.cv is None) == (args.test is None):
        raise CliError("give either a test file or --cv K")
    if args.cv is not None:
        ds = _load(args.data, args)
        report = evaluate_cv(kind, ds, args.cv, thr, args.seed, args.smoothing)
    else:
        tr, te = _load_pair(args.data, args.test, args)
        report = evaluate_holdout(kind, tr, te, thr, args.smoothing)
    _write(format_report(report, args.report_format) + "\n", args.output, out)
    return 0


def cmd_wrap(args, out) -> int:
    wc_kwargs = {"seed": args.seed, "alpha": args.smoothing}
    if args.grid is not None:
        wc_kwargs["threshold_grid"] = args.grid
    wc = WrapperConfig(**wc_kwargs)
    if args.test is not None:
        tr, te = _load_pair(args.data, args.test, args)
    else:
        tr, te = _load(args.data, args), None
    bn, report = wrapper_select(tr, wc)
    if te is not None:
        report.accuracy = accuracy_of(bn, te)
        report.n_test = te.n_cases
        report.std = binomial_std(report.accuracy, te.n_cases)
    if args.model_output:
        Path(args.model_output).write_text(export_bif(bn))
    _write(format_report(report, args.report_format) + "\n", args.output, out)
    return 0


def describe(bn: BayesNet) -> dict:
    s = bn.structure
    names = [a.name for a in bn.schema]
    return {
        "name": bn.name,
        "kind": s.kind,
        "class": names[bn.class_node],
        "class_values": list(bn.class_values),
        "threshold": s.threshold,
        "features": [names[n] for n in s.dag.nodes if n != bn.class_node],
        "arcs": [[names[p], names[c]] for p, c in s.dag.arcs],
    }


def cmd_export(args, out) -> int:
    bn = _read_model(args.model)
    info = describe(bn)
    if args.report_format == "json":
        text = json.dumps(info) + "\n"
    else:
        thr = "-" if info["threshold"] is None else f"{info['threshold']:g}"
        text = (
            f"network {info['name']}\n"
            f"kind {info['kind']}  threshold {thr}\n"
            f"class {info['class']} {{{', '.join(info['class_values'])}}}\n"
            f"features {len(info['features'])}: {', '.join(info['features'])}\n"
            f"arcs {len(info['arcs'])}\n"
            + to_edgelist(bn.structure.dag, [a.name for a in bn.schema])
        )
    _write(text, args.output, out)
    return 0


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "wrap": cmd_wrap,
    "export": cmd_export,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (CliError, ValueError, OSError, KeyError) as e:
        msg = str(e).strip().splitlines()[0] if str(e).strip() else type(e).__name__
        err.write(f"error: {msg}\n")
        return 2
    except Exception as e:  # pragma: no cover - last-resort guard
        err.write(f"error: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
