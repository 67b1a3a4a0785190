#!/usr/bin/env python3
"""Score an all-e0 baseline and the FSM detector on the default test set.

The FSM sees actions passed through a uniform noise channel at the given
accuracy; its numbers are mean +- 95% CI over perturbation seeds.
"""

import argparse

from cedbench.metrics import count_dataset, precision_recall_f1
from cedbench.noise import DEFAULT_ACCURACY
from cedbench.pipeline import build_dataset, sweep
from cedbench.simulator import default_config, load_config


def fmt(report, key, value):
    half = report.ci.get(key)
    return f"{value:.2f}" if not half else f"{value:.2f}+-{half:.2f}"


def row(name, r):
    cells = [fmt(r, f"precision_{c}", r.precision[k]) for k, c in enumerate(("e0", "e1", "e2", "e3"))]
    cells.append(fmt(r, "precision_avg", r.precision_avg))
    cells += [fmt(r, f"recall_{c}", r.recall[k]) for k, c in enumerate(("e0", "e1", "e2", "e3"))]
    cells.append(fmt(r, "recall_avg", r.recall_avg))
    cells += [fmt(r, "f1_all", r.f1_all), fmt(r, "f1_pos", r.f1_pos)]
    return [name] + cells


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="simulator YAML (default: bundled)")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--accuracy", type=float, default=DEFAULT_ACCURACY)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    config = load_config(args.config) if args.config else default_config()
    records = build_dataset(config, args.n)
    truth = [r.ce_labels for r in records]
    baseline = precision_recall_f1(count_dataset([(frozenset(),) * len(t) for t in truth], truth))
    [(_, fsm)] = sweep(records, [args.accuracy], args.runs, args.seed)

    header = ["model"] + [f"P {c}" for c in ("e0", "e1", "e2", "e3", "avg")]
    header += [f"R {c}" for c in ("e0", "e1", "e2", "e3", "avg")] + ["F1 all", "F1 pos"]
    rows = [header, row("all-e0", baseline), row(f"fsm@{args.accuracy:g}", fsm)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    for r in rows:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    main()
