"""Command-line front end.

Commands: clean, train, evaluate, predict, whatif, export-dot, serve.
Exit codes: 0 success, 2 data/model/file errors, 64 usage errors.
All commands are deterministic given their flags; train always prints the
seed it used so a run can be reproduced.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

from . import service as service_mod
from .cart import HyperParams, deserialize, fit, predict, serialize, to_dot
from .errors import GradecastError
from .evaluation import SplitConfig, format_matrix, format_report
from .ingest import FEATURE_NAMES, clean, dataset_to_csv, parse_csv, parse_number
from .pipeline import evaluate_on, train_and_evaluate
from .whatif import WhatIfConfig, render_rows, suggest

USAGE_ERROR = 64
DATA_ERROR = 2


class Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 64 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must be strictly between 0 and 1, got {text}")
    return value


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit an unsigned 64-bit integer")
    return value


def _caps(text: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError(f"expected 6 comma-separated caps, got {len(parts)}")
    return tuple(_finite(p) for p in parts)


def _mutable(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> Parser:
    parser = Parser(prog="gradecast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("clean", help="clean a raw CSV export")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--range-check", action="store_true", help="reject scores outside [0, 100]")

    p = sub.add_parser("train", help="clean, split, fit, evaluate, save the model")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="model file path")
    p.add_argument("--test-fraction", type=_fraction, default=0.25)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--criterion", choices=("gini", "entropy"), default="gini")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--range-check", action="store_true")

    p = sub.add_parser("evaluate", help="score a saved model against a labelled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--range-check", action="store_true")

    p = sub.add_parser("predict", help="predict one student")
    p.add_argument("--model", required=True)
    p.add_argument("--feature", action="append", type=_finite, metavar="VALUE",
                   help="repeat six times, in canonical column order")
    p.add_argument("--input", help="one-row CSV with the six criteria columns")

    p = sub.add_parser("whatif", help="minimal score improvements that flip to pass")
    p.add_argument("--model", required=True)
    p.add_argument("--feature", action="append", type=_finite, metavar="VALUE")
    p.add_argument("--input")
    p.add_argument("--step", type=_positive, default=1.0)
    p.add_argument("--caps", type=_caps, default=None, metavar="C0,...,C5")
    p.add_argument("--mutable", type=_mutable, default=None, metavar="I,J,...")
    p.add_argument("--depth", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("export-dot", help="write the tree as a Graphviz document")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="default: standard output")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data-dir", default=None,
                   help=f"defaults to ${service_mod.DATA_DIR_ENV} or {service_mod.DEFAULT_DATA_DIR}")
    p.add_argument("--addr", default=None,
                   help=f"host:port, defaults to ${service_mod.ADDR_ENV} or {service_mod.DEFAULT_ADDR}")
    return parser


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise GradecastError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise GradecastError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load_model(path: str):
    return deserialize(_read_text(path))


def _features_from_csv(path: str) -> list[float]:
    reader = csv.DictReader(_read_text(path).splitlines())
    rows = list(reader)
    if len(rows) != 1:
        raise GradecastError(f"{path}: expected exactly one data row, found {len(rows)}")
    missing = [n for n in FEATURE_NAMES if n not in (reader.fieldnames or [])]
    if missing:
        raise GradecastError(f"{path}: missing criteria columns: {', '.join(missing)}")
    values = []
    for name in FEATURE_NAMES:
        value = parse_number(rows[0][name])
        if value is None:
            raise GradecastError(f"{path}: column {name} is not a finite score")
        values.append(value)
    return values


def _resolve_features(args, parser: Parser) -> list[float]:
    if args.feature is not None and args.input is not None:
        parser.error("give either --feature flags or --input, not both")
    if args.feature is not None:
        if len(args.feature) != 6:
            parser.error(f"exactly six --feature flags required, got {len(args.feature)}")
        return list(args.feature)
    if args.input is not None:
        return _features_from_csv(args.input)
    parser.error("features required: six --feature flags or a one-row --input CSV")
    raise AssertionError("unreachable")


def _print_prediction(pred, feature_names) -> None:
    print(f"label={pred.label} probability={pred.pass_probability:.6f}")
    print(f"leaf: {pred.leaf}")
    if pred.path:
        print("path:")
        for step in pred.path:
            arrow = "left (true)" if step.went_left else "right (false)"
            print(f"  node {step.node}: {feature_names[step.feature]} <= {step.threshold:g} -> {arrow}")


def _print_whatif(result, features, feature_names) -> None:
    base = result.base
    print(f"base: label={base.label} probability={base.pass_probability:.6f}")
    if not result.suggestions:
        print("no cap-respecting improvement flips the prediction (reachable=false)")
        return
    print(f"{'#':>2}  {'feature':<14} {'current':>8} {'required':>9} {'delta':>7} {'total':>7} {'p(pass)':>8}")
    for row in render_rows(result, features, feature_names):
        if row["feature"] is None:
            print(f"{row['rank']:>2}  {'(no change needed)':<14} {'-':>8} {'-':>9} "
                  f"{row['delta']:>7.2f} {row['total']:>7.2f} {row['pass_probability']:>8.6f}")
        else:
            print(f"{row['rank']:>2}  {row['feature']:<14} {row['current']:>8.2f} {row['required']:>9.2f} "
                  f"{row['delta']:>7.2f} {row['total']:>7.2f} {row['pass_probability']:>8.6f}")


def _cmd_clean(args) -> int:
    dataset, report = clean(parse_csv(_read_text(args.input), source=args.input),
                            validate_range=args.range_check)
    _write_text(args.output, dataset_to_csv(dataset))
    print(f"records kept: {report.output_rows} of {report.input_rows}")
    print(f"columns dropped: {', '.join(report.dropped_columns) or '(none)'}")
    print(f"rows dropped (missing/invalid): {report.rows_dropped_missing}")
    print(f"rows dropped (duplicates): {report.rows_dropped_duplicate}")
    print(f"label mapping: {report.label_mapping}")
    print(f"cleaned CSV written: {args.output}")
    return 0


def _cmd_train(args) -> int:
    dataset, _ = clean(parse_csv(_read_text(args.input), source=args.input),
                       validate_range=args.range_check)
    params = HyperParams(
        criterion=args.criterion,
        max_depth=args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
    )
    split = SplitConfig(test_fraction=args.test_fraction, seed=args.seed,
                        shuffle=not args.no_shuffle)
    tree, report = train_and_evaluate(dataset, params, split)
    _write_text(args.out, serialize(tree))
    print(f"seed: {split.seed}")
    print(f"criterion: {params.criterion}")
    print(f"train size: {report.train_size}")
    print(f"test size: {report.test_size}")
    print(format_report(report), end="")
    print(format_matrix(report.matrix))
    if report.degenerate:
        print(f"degenerate metrics: {', '.join(sorted(report.degenerate))}")
    print(f"model written: {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    tree = _load_model(args.model)
    dataset, _ = clean(parse_csv(_read_text(args.input), source=args.input),
                       validate_range=args.range_check)
    report = evaluate_on(tree, dataset)
    print(f"records evaluated: {report.test_size}")
    print(format_report(report), end="")
    print(format_matrix(report.matrix))
    if report.degenerate:
        print(f"degenerate metrics: {', '.join(sorted(report.degenerate))}")
    return 0


def _cmd_predict(args, parser: Parser) -> int:
    tree = _load_model(args.model)
    features = _resolve_features(args, parser)
    _print_prediction(predict(tree, features), tree.feature_names)
    return 0


def _cmd_whatif(args, parser: Parser) -> int:
    tree = _load_model(args.model)
    features = _resolve_features(args, parser)
    config = WhatIfConfig(step=args.step, caps=args.caps, mutable=args.mutable,
                          depth=args.depth)
    result = suggest(tree, features, config)
    _print_whatif(result, features, tree.feature_names)
    return 0


def _cmd_export_dot(args) -> int:
    text = to_dot(_load_model(args.model))
    if args.out:
        _write_text(args.out, text)
        print(f"DOT written: {args.out}")
    else:
        print(text, end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "clean":
            return _cmd_clean(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "predict":
            return _cmd_predict(args, parser)
        if args.command == "whatif":
            return _cmd_whatif(args, parser)
        if args.command == "export-dot":
            return _cmd_export_dot(args)
        if args.command == "serve":
            service_mod.run(data_dir=args.data_dir, addr=args.addr)
            return 0
    except GradecastError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    raise AssertionError(f"unhandled command {args.command!r}")


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
