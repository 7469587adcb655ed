"""Command-line entry point: ``mteadn {run,suite,validate,summarize}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .harness import ConfigError, parse_config, run_experiment, summarize_directory
from .problems import SUITE_VERSION, build_builtin_suite


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    if args.output:
        config = replace(config, output_dir=args.output)
    if args.workers:
        config = replace(config, workers=args.workers)
    records = run_experiment(config, base_dir=Path(args.config).parent)
    print(f"{len(records)} runs written to {config.output_dir}")
    return 0


def _cmd_suite(args) -> int:
    print(f"# built-in suite {SUITE_VERSION} (artifact-defined constants)")
    print(f"{'name':6} {'category':8} tasks")
    for inst in build_builtin_suite():
        tasks = ", ".join(f"{t.name}:{t.base}/{t.shape}/D={t.dimension}" for t in inst.tasks)
        print(f"{inst.name:6} {inst.intersection + '-' + inst.similarity:8} {tasks}")
    return 0


def _cmd_validate(args) -> int:
    config = parse_config(args.config)
    total = len(config.instances) * len(config.algorithms) * config.repetitions
    print(f"ok: {len(config.instances)} instance(s) x {len(config.algorithms)} algorithm(s) "
          f"x {config.repetitions} repetition(s) = {total} runs")
    return 0


def _cmd_summarize(args) -> int:
    tables = summarize_directory(args.directory)
    print(f"wrote {', '.join(sorted(tables))} under {Path(args.directory) / 'summary'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mteadn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute an experiment")
    p.add_argument("config")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--output", help="output directory (overrides the config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("suite", help="list built-in instances")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("validate", help="parse a config without running it")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("summarize", help="re-derive summaries from persisted runs")
    p.add_argument("directory")
    p.set_defaults(func=_cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
