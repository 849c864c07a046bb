"""Command line entry point.

Usage:

    sampled-prophet <kind> --config config.json [--seed S] [--trials T]
                    [--eps E] [--out report.json] [--csv report.csv]
                    [--threads K] [--figures]

The kind must match the config's kind (or the config may omit it).  CLI
flags override the corresponding config fields.  Exit status is nonzero
when the experiment is refused or errors out.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    EXPERIMENT_KINDS,
    ConfigError,
    ExperimentConfig,
    emit_report,
    run_experiment,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampled-prophet",
        description="Seeded experiments for sample-based matroid prophet policies.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--eps", type=float, default=None, help="override the accuracy parameter")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--csv", default=None, help="write the CSV table here")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument(
            "--figures",
            action="store_true",
            help="render PNG figures next to the delimited output",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            spec = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    spec.setdefault("kind", args.kind)
    if spec["kind"] != args.kind:
        print(
            f"error: config kind {spec['kind']!r} does not match subcommand {args.kind!r}",
            file=sys.stderr,
        )
        return 2
    if args.seed is not None:
        spec["seed"] = args.seed
    if args.trials is not None:
        spec["trials"] = args.trials
    if args.eps is not None:
        spec["eps"] = args.eps
    try:
        cfg = ExperimentConfig.from_spec(spec)
        report = run_experiment(cfg, threads=max(args.threads, 1))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    written = emit_report(report, json_path=args.out, csv_path=args.csv, figures=args.figures)
    for path in written:
        print(f"wrote {path}")
    if args.out is None and args.csv is None:
        print(report.to_json())
    if report.status == "refused":
        print(f"refused: {report.results.get('reason', '')}", file=sys.stderr)
        return 3
    if report.status == "error":
        print(f"error: {report.results.get('reason', '')}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
