"""Command-line front end: run scenarios, sweep gains, benchmark the planner."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .bench import bench
from .fileio import (
    emit_scenario,
    export_csv,
    format_metrics_summary,
    parse_scenario,
    write_metrics_summary,
)
from .simulator import Scenario, run
from .sweep import format_sweep_table, sweep


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.seed is not None:
        scenario = replace(scenario, rng_seed=args.seed)
    if args.dt is not None:
        scenario = replace(scenario, dt=args.dt)
    if args.t_final is not None:
        scenario = replace(scenario, t_final=args.t_final)
    gain_overrides = {}
    if getattr(args, "lam", None) is not None:
        gain_overrides["lam"] = args.lam
    if getattr(args, "mu", None) is not None:
        gain_overrides["mu"] = args.mu
    if getattr(args, "k", None) is not None:
        gain_overrides["k_fb"] = args.k
    if gain_overrides:
        scenario = scenario.with_gains(**gain_overrides)
    return scenario


def _add_common_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override rng_seed")
    parser.add_argument("--dt", type=float, default=None, help="override time step (s)")
    parser.add_argument(
        "--t-final", type=float, default=None, help="override simulated horizon (s)"
    )


def _cmd_run(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_scenario(scenario, out / "scenario.yaml")
    t0 = time.perf_counter()
    log, metrics = run(scenario)
    elapsed = time.perf_counter() - t0
    export_csv(log, out / "trajectory.csv")
    write_metrics_summary(metrics, out / "metrics.txt")
    print(f"simulated {scenario.n_ticks} ticks x {scenario.n_robots} robots "
          f"in {elapsed:.2f}s")
    print(format_metrics_summary(metrics), end="")
    print(f"wrote {out / 'trajectory.csv'}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    entries = sweep(scenario, args.param, values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for entry in entries:
        if not entry.ok:
            continue
        tag = f"{args.param}_{entry.value:g}"
        export_csv(entry.log, out / f"trajectory_{tag}.csv")
        write_metrics_summary(entry.metrics, out / f"metrics_{tag}.txt")
    table = format_sweep_table(args.param, entries)
    (out / f"sweep_{args.param}.txt").write_text(table + "\n")
    print(table)
    failures = [e for e in entries if not e.ok]
    if failures:
        print(f"{len(failures)} of {len(entries)} runs failed", file=sys.stderr)
        return 1
    return 0


def _cmd_bench(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    report = bench(
        scenario,
        warmup_iters=args.warmup,
        measured_iters=args.iters,
        max_samples=args.max_samples,
    )
    table = report.format_table()
    print(table)
    if args.out is not None:
        Path(args.out).write_text(table + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmform",
        description="Decentralized rigid-formation planner: simulate, sweep, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario and export CSV + metrics")
    p_run.add_argument("--scenario", required=True, help="scenario YAML file")
    p_run.add_argument("--out", required=True, help="output directory")
    _add_common_overrides(p_run)
    p_run.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="override consensus gain")
    p_run.add_argument("--mu", type=float, default=None,
                       help="override soft-constraint gain")
    p_run.add_argument("--k", type=float, default=None,
                       help="override feedback gain")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="rerun a scenario across a gain grid")
    p_sweep.add_argument("--scenario", required=True, help="scenario YAML file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--param", required=True,
                         choices=("lambda", "mu", "k_fb"),
                         help="gain to vary")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated gain values, e.g. 1,2,8,32")
    _add_common_overrides(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bench = sub.add_parser("bench", help="micro-benchmark the planner steps")
    p_bench.add_argument("--scenario", required=True, help="scenario YAML file")
    p_bench.add_argument("--iters", type=int, default=100_000,
                         help="measured iterations per step")
    p_bench.add_argument("--warmup", type=int, default=1000,
                         help="warmup iterations per step")
    p_bench.add_argument("--max-samples", type=int, default=256,
                         help="number of robot states sampled from the run")
    p_bench.add_argument("--out", default=None, help="also write the table here")
    _add_common_overrides(p_bench)
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
