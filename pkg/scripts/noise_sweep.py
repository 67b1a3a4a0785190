#!/usr/bin/env python3
"""F1 of the FSM detector as the simulated action classifier gets worse."""

import argparse

from cedbench.cli import write_sweep
from cedbench.pipeline import build_dataset, sweep
from cedbench.simulator import default_config, load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--accuracy", type=float, nargs="+",
                    default=[1.0, 0.97, 0.95, 0.93, 0.91, 0.89, 0.87, 0.85, 0.8, 0.7])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="also write the sweep CSV here")
    args = ap.parse_args()

    config = load_config(args.config) if args.config else default_config()
    records = build_dataset(config, args.n)
    rows = sweep(records, args.accuracy, args.runs, args.seed)
    print(f"{'acc':>5}  {'f1_all':>13}  {'f1_pos':>13}  {'R e1':>5}  {'R e2':>5}  {'R e3':>5}")
    for acc, r in rows:
        print(f"{acc:5.2f}  {r.f1_all:.3f}+-{r.ci.get('f1_all', 0):.3f}  {r.f1_pos:.3f}+-{r.ci.get('f1_pos', 0):.3f}"
              f"  {r.recall[1]:.3f}  {r.recall[2]:.3f}  {r.recall[3]:.3f}")
    if args.out:
        write_sweep(rows, args.out)


if __name__ == "__main__":
    main()
