"""Run every kernel diagnostic benchmark and tabulate the localized kernel.

Usage: python3 scripts/kernel_diagnostics.py [--N 8] [--q 2]
"""
import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from lockern.diagnostics import run_benchmark
from lockern.hermite import build_localized_kernel, eval_localized

ALL_BENCHMARKS = (
    "reduction",
    "orthonormality",
    "localization",
    "interpolation",
    "dominance",
    "decay",
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=float, default=8.0)
    ap.add_argument("--q", type=int, default=2)
    args = ap.parse_args()

    failures = 0
    for bench in ALL_BENCHMARKS:
        for name, passed, detail in run_benchmark(bench):
            print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
            failures += 0 if passed else 1

    spec = build_localized_kernel(args.N, args.q)
    xs = np.linspace(0.0, 4.0, 17)
    print(f"\nlocalized kernel N={args.N} q={args.q} "
          f"({len(spec.coeffs)} coefficients, degree {spec.degree}):")
    for x, v in zip(xs, eval_localized(spec, xs)):
        print(f"  phi({x:4.2f}) = {v: .6e}")

    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
