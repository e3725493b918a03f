"""Command-line front end: simulate / verify / sweep.

Exit codes: 0 success, 1 verification failure, 2 unusable input
(config parse error, unknown suite), 3 numerical abort with partial
output written and flagged.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import build_run_config, expand_grid, parse_config_text
from .errors import ConfigError
from .harness import run_sweep, write_run
from .verify import SUITES, run_suite


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = build_run_config(_load_config(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out or cfg.output
    report = write_run(cfg, out_dir)
    print(f"wrote {out_dir}/trajectory.csv and report.json")
    if report.get("aborted"):
        print("numerical abort: partial trajectory flagged in report.json", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; available: {', '.join(sorted(SUITES))}", file=sys.stderr)
        return 2
    report = run_suite(args.suite, seed=args.seed)
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"[{status}] {report.suite}: {c.name}: residual {c.residual:.3e} <= {c.tolerance:.1e}")
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0 if report.passed else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        raw = _load_config(args.config)
        grid = expand_grid(raw)
        for cfg in grid:  # validate every grid point before running any
            build_run_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    summary = run_sweep(grid, args.out)
    n_fail = sum(1 for e in summary["runs"] if e["status"] != "ok")
    print(f"sweep: {summary['n_runs']} runs, {n_fail} failed; summary in {args.out}/summary.json")
    if "casimir_drift_order" in summary:
        print(f"casimir drift convergence order: {summary['casimir_drift_order']:.2f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lpflow",
        description="Simulate and verify the Lie-Poisson hierarchy flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one flow from a config file")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None, help="output directory (default: config 'output')")
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run a named property suite")
    p_ver.add_argument("--suite", required=True, help=f"one of: {', '.join(sorted(SUITES))}")
    p_ver.add_argument("--json", default=None, help="also write the report as JSON")
    p_ver.add_argument("--seed", type=int, default=1234)
    p_ver.set_defaults(func=cmd_verify)

    p_swp = sub.add_parser("sweep", help="run a config with brace-list parameter grids")
    p_swp.add_argument("--config", required=True)
    p_swp.add_argument("--out", required=True)
    p_swp.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
