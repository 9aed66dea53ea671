"""Compare all classification methods on the synthetic gesture set.

Runs the repeated stratified-split protocol once per method and writes a
combined results table, mirroring the CLI `experiment` subcommand but over
the whole method grid in one go.

Usage: python3 scripts/run_gesture_experiment.py [--per-cell 25] [--seed 42]
"""
import argparse
import os
import sys
from dataclasses import replace

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from lockern.experiments import (
    ExperimentConfig,
    ResultTable,
    gen_synthetic_gestures,
    run_experiment,
)

METHOD_GRID = [
    ExperimentConfig(feature="svd", r=5, kernel_kind="grassmann"),
    ExperimentConfig(feature="svd", r=5, kernel_kind="laplace_svd"),
    ExperimentConfig(feature="svd", r=5, kernel_kind="gaussian_svd"),
    ExperimentConfig(feature="pca", r=30, classifier="knn", knn_k=5),
    ExperimentConfig(feature="pca", r=30, kernel_kind="localized",
                     kernel_params={"N": 4.0, "q": 18}),
    ExperimentConfig(feature="pca", r=30, kernel_kind="localized",
                     kernel_params={"N": 8.0, "q": 18}),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-cell", type=int, default=25)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="gesture_results.csv")
    args = ap.parse_args()

    dataset = gen_synthetic_gestures(per_cell=args.per_cell, seed=args.seed)
    print(f"dataset: {len(dataset.samples)} samples, "
          f"{dataset.classes} classes, {len(dataset.subjects)} subjects")

    rows = []
    for base in METHOD_GRID:
        config = replace(base, seed=args.seed)
        table = run_experiment(config, dataset)
        row = table.rows[0]
        rows.append(row)
        print(f"{row.method:28s} {row.accuracy_mean:6.2f}% "
              f"(var {row.accuracy_var:.3f}, train {row.train_time_s:.2f}s)")

    ResultTable(rows=rows).write_csv(args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
