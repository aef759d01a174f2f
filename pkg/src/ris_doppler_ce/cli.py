"""Command-line entry point.

``run`` executes one Monte-Carlo scenario and writes the aggregated CSV
plus a JSON manifest (config echo, seed, version) alongside it.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

from . import __version__
from .config import ConfigError, load_config, serialize
from .harness import run_multipath, run_singlepath

SCENARIOS = ("multipath-power", "multipath-eta", "singlepath-m")


def describe_version() -> str:
    """git-describe of the working tree when available, else the package
    version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return f"v{__version__}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-doppler-ce",
        description="Link-level Monte-Carlo for surface-assisted OFDM "
        "channel estimation under UE mobility.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario sweep and write CSV")
    run.add_argument(
        "--scenario",
        required=True,
        choices=SCENARIOS,
        help="multipath-power sweeps tx power (a scalar tx_power_dbm in the "
        "config is replaced by the default 0..30 dBm grid); multipath-eta "
        "and singlepath-m sweep their own grids at the configured power",
    )
    run.add_argument("--config", required=True, help="config file path")
    run.add_argument("--runs", type=int, help="override the config run count")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _manifest_path(out_csv: str) -> str:
    base, _ = os.path.splitext(out_csv)
    return base + ".manifest.json"


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.scenario == "multipath-power":
            result = run_multipath(
                cfg, "power", n_runs=args.runs, seed=args.seed, jobs=args.jobs
            )
        elif args.scenario == "multipath-eta":
            result = run_multipath(
                cfg, "eta", n_runs=args.runs, seed=args.seed, jobs=args.jobs
            )
        else:
            result = run_singlepath(
                cfg, n_runs=args.runs, seed=args.seed, jobs=args.jobs
            )
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result.write_csv(args.out)
    manifest = {
        "scenario": args.scenario,
        "seed": args.seed if args.seed is not None else cfg.seed,
        "n_runs": args.runs if args.runs is not None else cfg.n_runs,
        "jobs": args.jobs,
        "version": describe_version(),
        "out": os.path.basename(args.out),
        "config": json.loads(serialize(cfg)),
    }
    with open(_manifest_path(args.out), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out} and {_manifest_path(args.out)}")
    return 0


def entrypoint() -> None:
    raise SystemExit(cli_main())
