"""Command-line experiment runner.

Subcommands: `run` executes a bundled or user-supplied scenario and writes
CSV/JSON artifacts, `list` prints the bundled catalog, `generate` writes a
standalone population CSV. Exit codes: 0 success, 1 configuration error,
2 runtime error. The output directory may also be set through the
GREENSTREAM_OUT environment variable (the --out flag wins).
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .population import PopulationConfig, generate, write_population_csv
from .scenarios import (
    ConfigError,
    bundled_scenarios,
    resolve_scenario,
    run_scenario,
)

ENV_OUT = "GREENSTREAM_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenstream",
        description="Seeded gamified-incentive experiments for energy-aware streaming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a bundled scenario or a scenario file")
    p_run.add_argument("scenario", help="bundled scenario name or path to a YAML file")
    p_run.add_argument("--seed", type=int, default=None, help="base seed override")
    p_run.add_argument("--reps", type=int, default=None, help="replication count override")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--mode", choices=["expected", "mc"], default=None)

    sub.add_parser("list", help="list bundled scenarios")

    p_gen = sub.add_parser("generate", help="write a population CSV and JSON sidecar")
    p_gen.add_argument("--users", type=int, default=1000)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output CSV path")
    return parser


def _cmd_run(args) -> int:
    cfg = resolve_scenario(args.scenario)
    out = args.out or os.environ.get(ENV_OUT) or f"results/{cfg.name}"
    summary = run_scenario(cfg, out, base_seed=args.seed,
                           replications=args.reps, mode=args.mode)
    arg = summary["argmax"]
    print(f"{cfg.name}: wrote {Path(out).resolve()}")
    print(f"  argmax mean energy reduction {arg['energy_w_mean'] / 1000:.2f} kW, "
          f"traffic {arg['traffic_pct_mean']:.2f}%, "
          f"switchers {arg['switchers_expected_mean']:.1f}")
    return 0


def _cmd_list() -> int:
    catalog = bundled_scenarios()
    width = max(len(name) for name in catalog)
    for name, path in catalog.items():
        cfg = resolve_scenario(name)
        print(f"{name:<{width}}  {cfg.title}  [{path}]")
    return 0


def _cmd_generate(args) -> int:
    cfg = PopulationConfig()
    cfg = replace(cfg, n_users=args.users, seed=args.seed)
    pop = generate(cfg)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_population_csv(pop, out)
    print(f"wrote {out} and {out.with_suffix('.json')} "
          f"({pop.n} users, seed {args.seed})")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        if args.command == "generate":
            return _cmd_generate(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - map everything else to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
