"""Command-line interface.

Subcommands: threshold (critical constants of a degree family), predict
(window predictions over a mu list), sample (graphs as JSONL), experiment
(Monte Carlo sweep to CSV/JSON), verify (invariant suite).

Exit codes: 0 success; 2 infeasible configuration; 3 statistical acceptance
failure in verify.
"""

from __future__ import annotations

import argparse
import json
import sys

from .asymptotics import VARIANTS, predict, twopath_constants
from .critical import critical_point
from .degset import parse_degree_set
from .errors import InfeasibleError, MaxAttemptsError, StatisticalFailure
from .graph import to_jsonl_line
from .harness import (
    compare_theory,
    config_from_mapping,
    emit,
    load_config_file,
    render_csv,
    render_json,
    run_experiment,
)
from .sampler import (
    DEFAULT_MAX_ATTEMPTS,
    build_dp,
    edges_for_mu,
    sample_simple_graph,
    trial_generator,
)

THRESHOLD_FIELDS = ("zhat", "alpha", "t3", "c2", "c3", "rho")
PREDICT_Q_SHOWN = 6


def _mu_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degwin",
        description="Critical-window structure of random graphs with constrained degrees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="critical constants of a degree family")
    p.add_argument("--degrees", required=True, help="degree set, e.g. '1,3,5,7' or 'pow2:64'")
    p.add_argument("--json", action="store_true", help="emit a JSON object")

    p = sub.add_parser("predict", help="window predictions over a mu list")
    p.add_argument("--degrees", required=True)
    p.add_argument("--mu", required=True, type=_mu_list,
                   help="comma list; use --mu=-2,0,2 for negative values")
    p.add_argument("--variant", default="scaled", choices=(*VARIANTS, "both"))
    p.add_argument("--qmax", default=20, type=int, help="truncation of the excess distribution")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    p = sub.add_parser("sample", help="sample graphs as JSONL")
    p.add_argument("--degrees", required=True)
    p.add_argument("--n", required=True, type=int)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int, help="edge count")
    group.add_argument("--mu", type=float, help="window location (sets m)")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--count", default=1, type=int, help="number of graphs")
    p.add_argument("--max-attempts", default=DEFAULT_MAX_ATTEMPTS, type=int)
    p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("experiment", help="Monte Carlo sweep; rows as CSV/JSON")
    p.add_argument("--config", help="flat key=value config file; flags override")
    p.add_argument("--degrees")
    p.add_argument("--n", type=int)
    p.add_argument("--mu", type=_mu_list,
                   help="comma list of window locations (--mu=-2,0,2 form for negatives)")
    p.add_argument("--m", type=lambda t: [int(x) for x in t.split(",") if x.strip()],
                   help="comma list of edge counts (alternative to --mu)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--qmax", default=20, type=int)
    p.add_argument("--no-compare", action="store_true",
                   help="skip the theory comparison printed to stderr")

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--seed", default=0, type=int)
    p.add_argument("--trials", default=400, type=int,
                   help="Monte Carlo trials for the statistical sections")
    p.add_argument("--skip-monte-carlo", action="store_true",
                   help="only the fast deterministic sections")
    return parser


def _cmd_threshold(args) -> int:
    ds = parse_degree_set(args.degrees)
    cp = critical_point(ds)
    values = dict(zip(THRESHOLD_FIELDS, (cp.zhat, cp.alpha, cp.t3, cp.c2, cp.c3, cp.rho)))
    if args.json:
        print(json.dumps({"degrees": str(ds), **values}))
    else:
        for name in THRESHOLD_FIELDS:
            print(f"{name} = {values[name]:.12g}")
    return 0


def _predict_row(cp, mu: float, variant: str, qmax: int) -> dict:
    pred = predict(cp, mu, variant, qmax)
    two = twopath_constants(cp, mu, q=1)
    row = {
        "mu": mu,
        "variant": variant,
        "survival": pred.survival,
        **{f"p{q}": pred.excess_dist[q] for q in range(PREDICT_Q_SHOWN + 1)},
        "planarity": pred.planarity,
        "b1": two.b1,
        "b2": two.b2,
    }
    return row


def _cmd_predict(args) -> int:
    ds = parse_degree_set(args.degrees)
    cp = critical_point(ds)
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    rows = [_predict_row(cp, mu, v, args.qmax) for mu in args.mu for v in variants]
    if args.json:
        print(json.dumps(rows, indent=1))
    elif args.csv:
        cols = list(rows[0])
        print(",".join(cols))
        for row in rows:
            print(",".join(f"{row[c]:.9g}" if isinstance(row[c], float) else str(row[c])
                           for c in cols))
    else:
        for row in rows:
            print(f"mu = {row['mu']:+g}  [{row['variant']}]")
            print(f"  survival  = {row['survival']:.6f}")
            dist = "  ".join(f"P({q})={row[f'p{q}']:.5f}" for q in range(PREDICT_Q_SHOWN + 1))
            print(f"  excess    : {dist}")
            print(f"  planarity = {row['planarity']:.6f}")
            print(f"  2-path    : b1 = {row['b1']:.6f}, b2 = {row['b2']:.6f} (q=1)")
    return 0


def _cmd_sample(args) -> int:
    ds = parse_degree_set(args.degrees)
    if args.m is not None:
        m = args.m
    else:
        m, realized = edges_for_mu(ds, args.n, args.mu)
        print(f"m = {m} (realized mu = {realized:.6g})", file=sys.stderr)
    dp = build_dp(ds, args.n, 2 * m)
    lines = []
    for t in range(args.count):
        g, _ = sample_simple_graph(
            ds, args.n, m, trial_generator(args.seed, t),
            max_attempts=args.max_attempts, dp=dp,
        )
        lines.append(to_jsonl_line(g))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    mapping: dict[str, object] = {}
    if args.config:
        mapping.update(load_config_file(args.config))
    for key, attr in (
        ("degrees", "degrees"), ("n", "n"), ("mu", "mu"), ("m", "m"),
        ("trials", "trials"), ("seed", "seed"), ("jobs", "jobs"),
        ("out", "out"), ("variant", "variant"),
    ):
        value = getattr(args, attr)
        if value is not None:
            mapping[key] = tuple(value) if isinstance(value, list) else value
    cfg = config_from_mapping(mapping)
    rt = run_experiment(cfg)
    if cfg.out:
        emit(rt, args.format, cfg.out)
        print(f"wrote {len(rt.rows)} rows to {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(render_csv(rt) if args.format == "csv" else render_json(rt))
    if not args.no_compare:
        cp = critical_point(parse_degree_set(cfg.degrees))
        report = compare_theory(rt, cp, q_max=args.qmax)
        for pt in report.points:
            print(
                f"mu={pt.realized_mu:+.4f} m={pt.m}: "
                f"survival {pt.survival_obs:.4f} vs {pt.survival_pred:.4f} "
                f"(z={pt.survival_z:+.2f}), excess chi2 p={pt.excess_pvalue:.3g}, "
                f"nonplanar {pt.nonplanar_obs:.4f} vs {pt.nonplanar_pred:.4f} "
                f"(z={pt.nonplanar_z:+.2f})",
                file=sys.stderr,
            )
        for sc in report.scalings:
            print(
                f"diameter scaling n={sc.n_small}->{sc.n_large}: ratio "
                f"{sc.ratio:.3f} (n^(1/3) predicts {sc.expected_ratio:.3f})",
                file=sys.stderr,
            )
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verify

    report = run_verify(
        seed=args.seed,
        trials=args.trials,
        monte_carlo=not args.skip_monte_carlo,
        log=print,
    )
    return 0 if report.ok else 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "threshold": _cmd_threshold,
        "predict": _cmd_predict,
        "sample": _cmd_sample,
        "experiment": _cmd_experiment,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except MaxAttemptsError as exc:
        print(f"no simple graph within the attempt budget: {exc}", file=sys.stderr)
        return 2
    except StatisticalFailure as exc:
        print(f"statistical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
