"""Command-line entry point.

Subcommands: ``crossval``, ``sensitivity``, ``bench``, ``fit``, ``predict``.
Reports are JSON objects printed to stdout or written with ``--output``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, kernels
from .classifier import ClassifierConfig, fit, load_model, model_to_dict, predict_batch
from .data import NORMALIZATION_SCHEMES, load_csv, load_matrix_csv
from .errors import ConfigError, DataError, InvariantError, NetClassError
from .experiments import crossval_accuracy, sensitivity_experiment, timing_benchmark
from .graph import parse_graph_mode

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _graph_arg(text):
    try:
        return parse_graph_mode(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_model_flags(p):
    p.add_argument("--measure", choices=["mst", "sssp"], default="mst")
    p.add_argument("--variation", choices=["abs", "rel"], default="abs")
    p.add_argument("--normalize", choices=list(NORMALIZATION_SCHEMES), default="minmax")
    p.add_argument("--graph", type=_graph_arg, default="complete", help="complete or knn:K")


def _add_input_flags(p, required=True):
    p.add_argument("--input", required=required, help="CSV file with a header row")
    p.add_argument("--label-col", default="label", help="name of the label column")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netclass", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"netclass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("crossval", help="stratified k-fold accuracy")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="folds evaluated concurrently")
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--csv", help="also write per-fold accuracies as CSV")

    p = sub.add_parser("sensitivity", help="same- vs different-class insertion perturbations")
    _add_input_flags(p)
    p.add_argument("--measure", choices=["mst", "sssp"], default="mst")
    p.add_argument("--normalize", choices=list(NORMALIZATION_SCHEMES), default="minmax")
    p.add_argument("--graph", type=_graph_arg, default="complete")
    p.add_argument("--insertions", type=int, default=5, help="insertions per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--csv", help="per-insertion deltas for box plots")

    p = sub.add_parser("bench", help="MST vs SSSP timing on random complete graphs")
    p.add_argument("--size", type=int, default=300)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--graphs", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")

    p = sub.add_parser("fit", help="train and save a model")
    _add_input_flags(p)
    _add_model_flags(p)
    p.add_argument("--output", required=True, help="model file (JSON)")

    p = sub.add_parser("predict", help="classify the rows of a CSV with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="query CSV (all numeric, header row)")
    p.add_argument("--label-col", default=None, help="column to ignore if present")
    p.add_argument("--output")
    p.add_argument("--csv", help="also write row,label as CSV")
    return parser


def _config(args) -> ClassifierConfig:
    return ClassifierConfig(args.measure, args.variation, args.normalize, args.graph)


def _report(command: str, config: dict, dataset: dict | None, result: dict) -> dict:
    return {
        "tool": "netclass",
        "version": __version__,
        "command": command,
        "config": config,
        "dataset": dataset,
        "result": result,
    }


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _commit(outputs: dict, stdout_text: str | None) -> None:
    """Write every output file or none: stage to temp files, then rename."""
    staged = []
    try:
        for path, text in outputs.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)
    if stdout_text is not None:
        sys.stdout.write(stdout_text)


def _emit(args, report: dict, extra: dict | None = None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    outputs = dict(extra or {})
    if getattr(args, "output", None):
        outputs[args.output] = text
        _commit(outputs, None)
    else:
        _commit(outputs, text)


def cmd_crossval(args) -> None:
    if args.folds < 2:
        raise ConfigError("--folds must be >= 2")
    ds = load_csv(args.input, args.label_col)
    cfg = _config(args)
    rep = crossval_accuracy(ds, cfg, args.folds, args.seed, workers=max(1, args.jobs))
    conf = {**cfg.to_dict(), "folds": args.folds, "seed": args.seed, "label_col": args.label_col}
    extra = {}
    if args.csv:
        rows = [(f, "" if a is None else repr(a)) for f, a in enumerate(rep.per_fold_accuracy)]
        extra[args.csv] = _csv_text(["fold", "accuracy"], rows)
    _emit(args, _report("crossval", conf, ds.fingerprint(), rep.to_dict()), extra)


def cmd_sensitivity(args) -> None:
    ds = load_csv(args.input, args.label_col)
    rep = sensitivity_experiment(
        ds, args.measure, args.insertions, args.seed, normalize=args.normalize, graph=args.graph
    )
    conf = {
        "measure": args.measure,
        "normalize": args.normalize,
        "graph": str(args.graph),
        "insertions": args.insertions,
        "seed": args.seed,
        "label_col": args.label_col,
    }
    extra = {}
    if args.csv:
        keys = ["network", "insertion", "sample", "sample_label", "delta"]
        rows = [[r[k] if k != "delta" else repr(r[k]) for k in keys] for r in rep.records]
        extra[args.csv] = _csv_text(keys, rows)
    _emit(args, _report("sensitivity", conf, ds.fingerprint(), rep.to_dict()), extra)


def cmd_bench(args) -> None:
    mst, sssp = timing_benchmark(args.size, args.reps, args.seed, n_graphs=args.graphs, dim=args.dim)
    conf = {
        "size": args.size,
        "reps": args.reps,
        "graphs": args.graphs,
        "dim": args.dim,
        "seed": args.seed,
        "backend": kernels.backend(),
    }
    result = {
        "unit": "ms",
        "mst": mst.to_dict(),
        "sssp": sssp.to_dict(),
        "mean_ratio_mst_over_sssp": mst.mean / sssp.mean if sssp.mean > 0 else None,
    }
    _emit(args, _report("bench", conf, None, result))


def cmd_fit(args) -> None:
    ds = load_csv(args.input, args.label_col)
    model = fit(ds, _config(args))
    doc = model_to_dict(model)
    doc["training"] = ds.fingerprint()
    _commit({args.output: json.dumps(doc) + "\n"}, None)


def cmd_predict(args) -> None:
    model = load_model(args.model)
    X, names = load_matrix_csv(args.input, args.label_col)
    if X.shape[1] != model.n_features:
        raise DataError(
            f"{args.input}: query has {X.shape[1]} feature columns, model expects {model.n_features}"
        )
    preds = predict_batch(model, X)
    rows = [{"row": i, **p.to_dict()} for i, p in enumerate(preds)]
    conf = {"model": str(args.model), **model.config.to_dict()}
    extra = {}
    if args.csv:
        extra[args.csv] = _csv_text(["row", "label"], [(r["row"], r["label"]) for r in rows])
    _emit(args, _report("predict", conf, {"rows": X.shape[0], "columns": X.shape[1]}, {"predictions": rows}), extra)


COMMANDS = {
    "crossval": cmd_crossval,
    "sensitivity": cmd_sensitivity,
    "bench": cmd_bench,
    "fit": cmd_fit,
    "predict": cmd_predict,
}


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except _UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"netclass: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"netclass: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InvariantError, NetClassError) as exc:
        print(f"netclass: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"netclass: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
