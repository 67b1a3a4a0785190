"""Command-line front end.

    cedbench generate --n 1000 --seed 7 --out test.jsonl [--config cfg.yaml]
    cedbench perturb  --in test.jsonl --accuracy 0.91 --seed 1 --out noisy.jsonl
    cedbench detect   --in noisy.jsonl --out pred.jsonl
    cedbench evaluate --in test.jsonl --pred pred.jsonl --out report.csv
    cedbench sweep    --in test.jsonl --accuracy 1.0 0.95 0.91 --runs 10 --seed 0 --out sweep.csv

Exit status: 0 success, 2 usage, 3 configuration error, 4 validation error,
5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import dataset_io, metrics, pipeline
from .errors import ConfigError, DatasetParseError, ValidationError
from .noise import DEFAULT_ACCURACY, load_matrix, uniform_from_accuracy
from .simulator import default_config, load_config

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_VALIDATION = 4
EXIT_IO = 5

log = logging.getLogger("cedbench")


def _config(args):
    cfg = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    return cfg


def _noise_model(args):
    if args.matrix:
        return load_matrix(args.matrix)
    acc = DEFAULT_ACCURACY if args.accuracy is None else args.accuracy
    try:
        return uniform_from_accuracy(acc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_generate(args) -> int:
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    records = pipeline.build_dataset(_config(args), args.n, workers=args.workers)
    dataset_io.write_dataset(records, args.out)
    log.info("wrote %d examples to %s", len(records), args.out)
    return EXIT_OK


def cmd_perturb(args) -> int:
    model = _noise_model(args)
    records = dataset_io.read_dataset(args.inp)
    dataset_io.write_dataset(pipeline.perturb_records(records, model, args.seed), args.out)
    return EXIT_OK


def cmd_detect(args) -> int:
    records = dataset_io.read_dataset(args.inp)
    dataset_io.write_predictions(pipeline.detect_records(records), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    truth = dataset_io.read_dataset(args.inp)
    if args.pred:
        reports = [pipeline.evaluate(dataset_io.read_predictions(p), truth) for p in args.pred]
    else:
        if args.runs is None:
            raise ConfigError("evaluate needs --pred files, or --runs to perturb and detect internally")
        model = _noise_model(args)
        seed = args.seed or 0
        reports = pipeline.noisy_runs(truth, model, [seed + k for k in range(args.runs)])
    report = metrics.aggregate(reports)
    metrics.write_report({args.model: report}, args.out)
    print(f"F1 All {report.f1_all:.4f}  F1 Pos {report.f1_pos:.4f}  runs {report.runs}")
    return EXIT_OK


SWEEP_COLUMNS_HEAD = ("accuracy", "runs")


def cmd_sweep(args) -> int:
    accuracies = args.accuracy or [DEFAULT_ACCURACY]
    for a in accuracies:
        if not 0.0 <= a <= 1.0:
            raise ConfigError(f"accuracy {a} outside [0, 1]")
    records = dataset_io.read_dataset(args.inp)
    rows = pipeline.sweep(records, accuracies, args.runs or 1, args.seed or 0)
    write_sweep(rows, args.out)
    for acc, rep in rows:
        print(f"accuracy {acc:.3f}  F1 All {rep.f1_all:.4f} ± {rep.ci.get('f1_all', 0.0):.4f}  "
              f"F1 Pos {rep.f1_pos:.4f} ± {rep.ci.get('f1_pos', 0.0):.4f}")
    return EXIT_OK


def sweep_columns() -> list[str]:
    return [*SWEEP_COLUMNS_HEAD, *(c for n in metrics.METRIC_NAMES for c in (n, n + "_ci"))]


def write_sweep(rows, path) -> None:
    cols = sweep_columns()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for acc, rep in rows:
            d = rep.as_dict()
            vals = [f"{acc:g}", rep.runs]
            for n in metrics.METRIC_NAMES:
                vals += [f"{d[n]:.6f}", f"{rep.ci.get(n, 0.0):.6f}"]
            w.writerow(vals)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cedbench", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate labeled examples")
    g.add_argument("--config", type=Path, help="simulator YAML config (default: bundled)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, help="overrides base_seed from the config")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", type=Path, required=True)
    g.set_defaults(func=cmd_generate)

    def noise_flags(sp):
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument("--accuracy", type=float,
                         help=f"uniform classifier accuracy (default {DEFAULT_ACCURACY})")
        grp.add_argument("--matrix", type=Path, help="9x9 confusion-matrix file")

    pt = sub.add_parser("perturb", help="add observed actions through a noise channel")
    pt.add_argument("--in", dest="inp", type=Path, required=True)
    noise_flags(pt)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out", type=Path, required=True)
    pt.set_defaults(func=cmd_perturb)

    d = sub.add_parser("detect", help="run the streaming FSM detector")
    d.add_argument("--in", dest="inp", type=Path, required=True)
    d.add_argument("--out", type=Path, required=True)
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("evaluate", help="score predictions against ground truth")
    e.add_argument("--in", "--truth", dest="inp", type=Path, required=True, help="labeled dataset")
    e.add_argument("--pred", type=Path, nargs="+", help="prediction file(s); several give CI columns")
    e.add_argument("--runs", type=int, help="without --pred: perturb+detect this many seeds")
    noise_flags(e)
    e.add_argument("--seed", type=int)
    e.add_argument("--model", default="fsm", help="value of the report's model column")
    e.add_argument("--out", type=Path, required=True)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", help="metrics as a function of classifier accuracy")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--accuracy", type=float, nargs="+")
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "runs", None) is not None and args.runs < 1:
        print("error: --runs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, DatasetParseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
