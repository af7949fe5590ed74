"""Command line entry point: ``syz <scenario> --config FILE [--seed N] [--out DIR] [--tol X]``.

Writes ``report.json`` and the scenario CSVs into the output directory and
exits with status 0 only when every check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .checks import CSV_SCHEMAS, SCENARIOS, RunConfig, run_scenario


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="syz", description="Run SYZ mirror verification suites.")
    p.add_argument("scenario", choices=SCENARIOS + ("all",))
    p.add_argument("--config", type=Path, help="JSON run configuration (default: A_2 reference set)")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", type=Path, help="output directory (default: syz_out)")
    p.add_argument("--tol", type=float, help="override psi_match_tol")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def load_config(args) -> RunConfig:
    obj = json.loads(args.config.read_text()) if args.config else {}
    cfg = RunConfig.from_json(obj, scenario=args.scenario, seed=args.seed, out=args.out)
    if args.tol is not None:
        cfg = replace(cfg, precision=replace(cfg.precision, psi_match_tol=args.tol))
    return cfg


def build_report(cfg: RunConfig, ctx, runtime: float) -> dict:
    records = [r.to_json() for r in ctx.records]
    return {
        "version": __version__,
        "config": cfg.to_json(),
        "passed": all(r.passed for r in ctx.records),
        "checks": records,
        "anchors": {r.name: r.anchor for r in ctx.records},
        "csv": {name: {"schema": ver, "header": list(CSV_SCHEMAS[name][1] or ())}
                for name, ver in ctx.csv_files.items()},
        "runtime": runtime,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"syz: invalid configuration: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    ctx = run_scenario(cfg)
    report = build_report(cfg, ctx, time.perf_counter() - t0)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "report.json").write_text(json.dumps(report, indent=2))
    for r in ctx.records:
        measured = "error" if r.measured is None else f"{r.measured:.3g}"
        print(f"{r.status.upper():4}  {r.name:32} measured={measured:>10} "
              f"tol={r.tolerance:.3g}  {r.runtime:6.2f}s  {r.detail}")
    print(f"{'PASS' if report['passed'] else 'FAIL'}: {sum(r.passed for r in ctx.records)}"
          f"/{len(ctx.records)} checks, report in {cfg.out / 'report.json'}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
