"""Command-line entry point.

Subcommands: ``obfuscate`` (publish noisy series from an axe CSV),
``simulate`` (Monte Carlo report, optionally the paired client comparison),
``sweep`` (parameter grid), ``synth`` (write the concentrated-client
scenario), ``metrics`` (leakage/over-axe statistics from existing CSVs).

Exit codes: 0 success, 1 I/O failure, 2 validation/usage error. All
randomness derives from the ``--seed`` flag of the invoked subcommand.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dp_core import RngHandle
from .errors import InvalidInputError, InvalidParameterError, MechanismStateError
from .io import (
    load_run_config,
    load_scenario,
    read_axe_csv,
    read_market_csv,
    write_axe_csv,
    write_report,
)
from .mechanisms import MECHANISMS, publish_series, split_stream
from .metrics import leakage_probability
from .finance import over_axe_cost, over_axe_quantity
from .simulator import (
    STRATEGIES,
    compare_with_without_client,
    epsilon_grid,
    run_monte_carlo,
    sweep,
    synth_concentrated_scenario,
)

DEFAULT_GRID = "eps=0.1,0.3,0.5,0.9;T=30;B=20"


def _parse_lags(text: str) -> tuple[int, ...]:
    try:
        lags = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise InvalidParameterError(f"lags must be comma-separated integers, got {text!r}") from None
    if not lags:
        raise InvalidParameterError("at least one lag is required")
    return lags


def _parse_grid(text: str, base) -> list:
    """Parse 'eps=0.1,0.3;T=30;B=10,20' into DpParams points (missing dims at base values)."""
    dims = {"eps": [base.epsilon], "T": [base.horizon], "B": [base.bucket]}
    for part in text.split(";"):
        name, sep, rest = part.partition("=")
        name = name.strip()
        if not sep or name not in dims:
            raise InvalidParameterError(f"bad grid dimension {part!r}; expected eps=/T=/B=")
        pieces = [p.strip() for p in rest.split(",")]
        if not pieces or any(not p for p in pieces):
            raise InvalidParameterError(f"empty value in grid dimension {name!r}")
        try:
            dims[name] = [float(p) if name == "eps" else int(p) for p in pieces]
        except ValueError:
            raise InvalidParameterError(f"non-numeric value in grid dimension {name!r}") from None
    return epsilon_grid(dims["eps"], dims["T"], dims["B"], base)


def _resolve_scenario(args, config):
    """Scenario files from --scenario DIR (axe.csv etc. inside) or the config file."""
    if args.scenario is not None:
        directory = Path(args.scenario)
        axe = directory / "axe.csv"
        if not axe.exists():
            raise InvalidInputError(f"scenario directory {directory} has no axe.csv")
        client = directory / "client.csv"
        market = directory / "market.csv"
        return axe, (client if client.exists() else None), (market if market.exists() else None)
    if config.axe_csv is None:
        raise InvalidInputError("no scenario: pass --scenario DIR or set [scenario] axe_csv in the config")
    return config.axe_csv, config.client_csv, config.market_csv


def _load_scenario_for(args, config):
    axe, client, market = _resolve_scenario(args, config)
    adtv = dict(config.adtv)
    scenario, filled = load_scenario(
        axe,
        client_path=client,
        market_path=market,
        include_client=config.include_client,
        adtv=adtv or None,
    )
    if filled:
        print(f"note: forward-filled {filled} missing business day(s)", file=sys.stderr)
    return scenario


def _cmd_obfuscate(args) -> int:
    config = load_run_config(args.config)
    table = read_axe_csv(args.input)
    root = RngHandle(args.seed)
    published = {}
    for index, asset in enumerate(sorted(table.series)):
        params = config.dp_params(asset, zero_noise=args.zero_noise)
        stream = split_stream(table.series[asset])
        published[asset] = publish_series(stream, params, args.mechanism, root.substream(index))
        print(
            f"{asset}: days={len(table.series[asset])} epsilon={params.epsilon} "
            f"T={params.horizon} B={params.bucket} mechanism={args.mechanism}"
        )
    write_axe_csv(args.output, published, table.dates)
    print(f"wrote {args.output}")
    return 0


def _sim_config(args, config, strategy: str):
    overrides = {}
    if args.paths is not None:
        overrides["n_paths"] = args.paths
    if args.write_paths is not None:
        overrides["record_paths"] = args.write_paths
    if args.lags is not None:
        overrides["leak_lags"] = _parse_lags(args.lags)
    if getattr(args, "zero_noise", False):
        overrides["dp"] = config.dp_params(zero_noise=True)
    return config.sim_config(strategy, args.seed, **overrides)


def _cmd_simulate(args) -> int:
    config = load_run_config(args.config)
    scenario = _load_scenario_for(args, config)
    sim = _sim_config(args, config, args.strategy)
    if args.compare_client:
        report = compare_with_without_client(scenario, sim)
    else:
        report = run_monte_carlo(scenario, sim)
    written = write_report(report, args.out, write_paths=sim.record_paths > 0)
    print(f"paths={sim.n_paths} strategy={sim.strategy} rows={len(report.rows)}")
    for name, path in written.items():
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    config = load_run_config(args.config)
    scenario = _load_scenario_for(args, config)
    sim = _sim_config(args, config, args.strategy)
    grid = _parse_grid(args.grid, config.dp_params())
    report = sweep(scenario, grid, sim)
    written = write_report(report, args.out, write_paths=sim.record_paths > 0)
    print(f"grid_points={len(grid)} paths={sim.n_paths} rows={len(report.rows)}")
    for name, path in written.items():
        print(f"wrote {path}")
    return 0


def _cmd_synth(args) -> int:
    scenario = synth_concentrated_scenario(
        days=args.days, start_position=args.start, ramp_factor=args.ramp
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_axe_csv(out / "axe.csv", scenario.hist_axe, scenario.dates)
    write_axe_csv(out / "client.csv", scenario.client_positions, scenario.dates)
    print(f"wrote {out / 'axe.csv'} and {out / 'client.csv'} ({args.days} business days)")
    return 0


def _cmd_metrics(args) -> int:
    published = read_axe_csv(args.published)
    client = read_axe_csv(args.client)
    lags = _parse_lags(args.lags)
    for asset in sorted(published.series):
        if asset not in client.series:
            continue
        for lag in lags:
            lp = leakage_probability(client.series[asset], published.series[asset], lag)
            print(f"{asset} lag={lag} leak_probability={lp:.4f}")
    if args.true is not None and args.market is not None:
        true_table = read_axe_csv(args.true)
        quotes, _, _ = read_market_csv(args.market)
        for asset in sorted(published.series):
            if asset not in true_table.series or asset not in quotes:
                continue
            pub = published.series[asset]
            true = true_table.series[asset]
            if len(pub) != len(true):
                raise InvalidInputError(f"published and true series misaligned for {asset}")
            qty = [
                float(over_axe_quantity(p, t, quotes[asset].day(i)))
                for i, (p, t) in enumerate(zip(pub, true))
            ]
            cost = [
                float(over_axe_cost(p, t, quotes[asset].day(i)))
                for i, (p, t) in enumerate(zip(pub, true))
            ]
            freq = sum(q > 0 for q in qty) / len(qty)
            print(f"{asset} over_axe_frequency={freq:.4f} over_axe_cost_mean={sum(cost) / len(cost):.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axedp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    obf = sub.add_parser("obfuscate", help="publish a noisy version of an axe CSV")
    obf.add_argument("--input", required=True, help="axe CSV (date,asset,quantity)")
    obf.add_argument("--config", required=True, help="run-config file with [dp] and [adtv]")
    obf.add_argument("--mechanism", choices=MECHANISMS, default="window")
    obf.add_argument("--seed", type=int, default=0, help="master seed for all noise")
    obf.add_argument("--output", required=True, help="published CSV to write")
    obf.add_argument("--zero-noise", action="store_true", help="debug: disable perturbation")
    obf.set_defaults(func=_cmd_obfuscate)

    def add_sim_flags(cmd, with_compare: bool):
        cmd.add_argument("--scenario", help="directory with axe.csv (+ client.csv, market.csv)")
        cmd.add_argument("--config", required=True, help="run-config file")
        cmd.add_argument("--strategy", choices=STRATEGIES, default="window")
        cmd.add_argument("--paths", type=int, help="override configured path count")
        cmd.add_argument("--seed", type=int, default=0, help="master seed")
        cmd.add_argument("--out", default="out", help="report directory")
        cmd.add_argument("--lags", help="override leak lags, e.g. 1,5,10")
        cmd.add_argument("--write-paths", type=int, help="record per-day records for N paths")
        cmd.add_argument("--zero-noise", action="store_true", help="debug: disable perturbation")
        if with_compare:
            cmd.add_argument(
                "--compare-client",
                action="store_true",
                help="paired runs with and without the client's positions",
            )

    sim = sub.add_parser("simulate", help="Monte Carlo simulation report")
    add_sim_flags(sim, with_compare=True)
    sim.set_defaults(func=_cmd_simulate)

    swp = sub.add_parser("sweep", help="simulate over a parameter grid")
    add_sim_flags(swp, with_compare=False)
    swp.add_argument("--grid", default=DEFAULT_GRID, help="e.g. 'eps=0.1,0.3;T=30;B=10,20'")
    swp.set_defaults(func=_cmd_sweep)

    syn = sub.add_parser("synth", help="write the synthetic concentrated-client scenario")
    syn.add_argument("--days", type=int, default=44, help="business days (default two months)")
    syn.add_argument("--start", type=int, default=100_000, help="initial client position, shares")
    syn.add_argument("--ramp", type=float, default=10.0, help="final/initial position ratio")
    syn.add_argument("--out", required=True, help="scenario directory to create")
    syn.set_defaults(func=_cmd_synth)

    met = sub.add_parser("metrics", help="leakage/over-axe statistics from existing CSVs")
    met.add_argument("--published", required=True, help="published axe CSV")
    met.add_argument("--client", required=True, help="client positions CSV")
    met.add_argument("--lags", default="1,5,10")
    met.add_argument("--true", help="true axe CSV (enables over-axe metrics)")
    met.add_argument("--market", help="market CSV (enables over-axe metrics)")
    met.set_defaults(func=_cmd_metrics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, InvalidInputError, MechanismStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
