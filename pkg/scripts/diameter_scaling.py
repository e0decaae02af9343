#!/usr/bin/env python3
"""Measure how the complex-part diameter grows with n at the critical point.

Samples graphs at mu = 0 for each size in ``--n``, conditions on a nonempty
complex part, and reports the mean diameter per size, the fitted log-log
growth exponent (the n^(1/3) law predicts 1/3), and every pairwise ratio
next to its (n_large / n_small)^(1/3) prediction.

Example:

    python scripts/diameter_scaling.py --degrees all:60 --n 512,1024,4096 \
        --trials 2000 --jobs 8
"""

import argparse
import math
import sys

import numpy as np

from degwin.critical import critical_point
from degwin.degset import parse_degree_set
from degwin.harness import (
    ExperimentConfig,
    ResultTable,
    aggregate_rows,
    compare_theory,
    run_experiment,
)


def comma_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="complex-part diameter growth at the critical point"
    )
    parser.add_argument("--degrees", default="all:60")
    parser.add_argument("--n", type=comma_ints, default=(512, 1024, 2048),
                        help="comma list of sizes, ascending")
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=20260825)
    parser.add_argument("--jobs", type=int, default=1)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    ds = parse_degree_set(args.degrees)
    rows = []
    for n in args.n:
        cfg = ExperimentConfig(
            degrees=args.degrees, n=n, mus=(0.0,), trials=args.trials,
            seed=args.seed, jobs=args.jobs,
        )
        rows.extend(run_experiment(cfg).rows)
    merged = ResultTable(
        degrees=args.degrees, seed=args.seed, variant="scaled",
        rows=tuple(rows), aggregates=aggregate_rows(rows),
    )
    print(f"degrees {{{args.degrees}}}, mu = 0, {args.trials} trials per size, "
          f"conditioned on a nonempty complex part:")
    sizes, diameters = [], []
    for agg in merged.aggregates:
        print(f"  n = {agg.n:6d}: complex part in {agg.complex_trials}/"
              f"{agg.trials} trials, mean diameter "
              f"{agg.mean_diameter:.3f} +- {agg.se_diameter:.3f}")
        sizes.append(agg.n)
        diameters.append(agg.mean_diameter)
    if len(sizes) >= 2:
        slope, _ = np.polyfit(np.log(sizes), np.log(diameters), 1)
        print(f"fitted growth exponent: {slope:.4f} (n^(1/3) law predicts "
              f"{1.0 / 3.0:.4f})")
    report = compare_theory(merged, critical_point(ds))
    for sc in report.scalings:
        print(f"  ratio n={sc.n_small} -> n={sc.n_large}: {sc.ratio:.4f} "
              f"(prediction {sc.expected_ratio:.4f})")
    worst = max(
        (abs(math.log(sc.ratio / sc.expected_ratio)) for sc in report.scalings),
        default=0.0,
    )
    return 0 if worst <= math.log(1.25) else 1


if __name__ == "__main__":
    sys.exit(main())
