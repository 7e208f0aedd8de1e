"""Command-line entry point.

Examples:
  radioplan report --config quito-stadium.yaml --out out --format markdown
  radioplan capacity --out out
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from radioplan.config import COMMANDS, ConfigError, bundled_config_path, load_config
from radioplan.report import PlanError, render_report, run_plan, summarize
from radioplan.units import DomainError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

log = logging.getLogger("radioplan")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radioplan",
                                 description="NTN / RIS-TN radio network planning")
    ap.add_argument("command", choices=(*COMMANDS, "report"),
                    help="planning step to run; 'report' runs all of them")
    ap.add_argument("--config", default=None,
                    help="planning config (YAML); defaults to the bundled quito-stadium file")
    ap.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    ap.add_argument("--format", choices=("csv", "markdown"), default="csv")
    ap.add_argument("--policy", choices=("ceil", "nearest"), default=None,
                    help="site-count rounding (default: the config's policy)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg_path = Path(args.config) if args.config else bundled_config_path()
    try:
        cfg = load_config(cfg_path)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config {cfg_path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG

    commands = COMMANDS if args.command == "report" else (args.command,)
    out_dir = Path(args.out or cfg.output_dir)
    try:
        rep = run_plan(cfg, commands, out_dir=out_dir, policy=args.policy)
        written = render_report(rep, out_dir, args.format)
    except PlanError as exc:
        print(f"computation error at {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (DomainError, LookupError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    for line in summarize(rep):
        print(line)
    for p in [*written, *rep.files]:
        print(f"wrote {p}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
