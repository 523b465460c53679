"""Standalone renderer: one subcommand per figure kind.

Exit codes: 0 success, 1 I/O failure, 2 missing/invalid inputs.
"""

from __future__ import annotations

import argparse
import sys

from .figures import plot_lp_histogram, plot_metric_vs_epsilon, plot_scenario_fan
from .reading import FigureInputError


def _cmd_metric(args) -> int:
    result = plot_metric_vs_epsilon(
        args.metrics,
        metric=args.metric,
        lag=args.lag,
        scenario=args.scenario,
        output=args.out,
        title=args.title,
    )
    print(f"wrote {result.output} ({result.line_count} series)")
    return 0


def _cmd_histogram(args) -> int:
    result = plot_lp_histogram(
        args.histograms,
        scenarios=[s.strip() for s in args.scenarios.split(",") if s.strip()],
        metric=args.metric,
        lag=args.lag,
        epsilon=args.epsilon,
        output=args.out,
        title=args.title,
    )
    print(f"wrote {result.output} ({result.bar_groups} scenario groups)")
    return 0


def _cmd_fan(args) -> int:
    result = plot_scenario_fan(
        args.paths,
        asset=args.asset,
        max_paths=args.max_paths,
        output=args.out,
        title=args.title,
    )
    print(f"wrote {result.output} ({result.line_count} lines)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axeplots", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    metric = sub.add_parser("metric-vs-epsilon", help="error-bar lines of a metric against the budget")
    metric.add_argument("--metrics", required=True, help="metrics.csv from a sweep")
    metric.add_argument("--metric", required=True, help="metric name, e.g. pnl_diff_vs_true")
    metric.add_argument("--lag", type=int, default=0)
    metric.add_argument("--scenario", help="restrict to one scenario label")
    metric.add_argument("--out", default="metric_vs_epsilon.svg")
    metric.add_argument("--title")
    metric.set_defaults(func=_cmd_metric)

    hist = sub.add_parser("lp-histogram", help="grouped decile bars per scenario")
    hist.add_argument("--histograms", required=True, help="histograms.csv")
    hist.add_argument("--scenarios", required=True, help="comma-separated labels, e.g. nonobf_excl,obf_incl,obf_excl")
    hist.add_argument("--metric", default="leak_probability")
    hist.add_argument("--lag", type=int)
    hist.add_argument("--epsilon", type=float)
    hist.add_argument("--out", default="lp_histogram.svg")
    hist.add_argument("--title")
    hist.set_defaults(func=_cmd_histogram)

    fan = sub.add_parser("scenario-fan", help="true axe, client positions and sampled published paths")
    fan.add_argument("--paths", required=True, help="paths.csv")
    fan.add_argument("--asset", required=True)
    fan.add_argument("--max-paths", type=int, default=6)
    fan.add_argument("--out", default="scenario_fan.svg")
    fan.add_argument("--title")
    fan.set_defaults(func=_cmd_fan)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
