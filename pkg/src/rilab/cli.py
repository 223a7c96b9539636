"""Command line entry points: `rilab run` and `rilab merge`.

Exit status contract: 0 when every asserted check passes (hypothesis-failed
checks never count), 1 when an asserted check fails (names on stderr), 2 on
configuration errors.  Report files are written atomically; identical config
and seed produce byte-identical report JSON.
"""

import argparse
import json
import os
import sys

from . import flow as fl
from . import plots
from .config import ConfigError, load_config
from .reports import (
    failures,
    merge_report_files,
    write_atomic,
    write_reports,
    write_summary_csv,
)
from .suites import SUITE_RUNNERS, RunContext


def _build_parser():
    parser = argparse.ArgumentParser(prog="rilab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run verification suites from a config")
    run.add_argument("--config", required=True, help="path to the JSON run config")
    run.add_argument("--suite", action="append", default=None, help="suite name (repeatable)")
    run.add_argument("--out", default=None, help="output directory override")
    run.add_argument("--seed", type=int, default=None, help="seed override")

    merge = sub.add_parser("merge", help="merge report JSON files into a summary CSV")
    merge.add_argument("files", nargs="*", help="report JSON files")
    merge.add_argument("--out", default=None, help="write CSV here instead of stdout")
    return parser


def _csv_rows(rows):
    lines = ["name,count,pass_rate,min_slack"]
    for name, count, rate, min_slack in rows:
        lines.append(f"{name},{count},{rate:.17g},{min_slack:.17g}")
    return "\n".join(lines) + "\n"


def command_run(args):
    try:
        cfg = load_config(args.config)
        if args.suite:
            cfg.suites = list(args.suite)
        if args.out is not None:
            cfg.out = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        suites = cfg.resolved_suites()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = cfg.out
    os.makedirs(out_dir, exist_ok=True)
    ctx = RunContext(cfg)
    all_reports = []
    written = []

    for name in suites:
        try:
            reports, artifacts = SUITE_RUNNERS[name](ctx)
        except fl.CflError as exc:
            print(f"suite {name}: flow step rejected: {exc}", file=sys.stderr)
            return 1
        except fl.FlowError as exc:
            print(f"suite {name}: {exc}", file=sys.stderr)
            return 1
        all_reports.extend(reports)
        path = os.path.join(out_dir, f"{name}_reports.json")
        write_reports(path, reports)
        written.append(os.path.basename(path))

        if "entropy_records" in artifacts:
            written.append(
                os.path.basename(
                    plots.entropy_figure(
                        artifacts["entropy_records"], os.path.join(out_dir, "entropy.svg")
                    )
                )
            )
        if "ultracontractivity_rows" in artifacts:
            rows = artifacts["ultracontractivity_rows"]
            lines = ["t,empirical_2_inf,bound_2_inf,slack"]
            lines += [f"{t:.17g},{e:.17g},{b:.17g},{s:.17g}" for t, e, b, s in rows]
            table = os.path.join(out_dir, "ultracontractivity.csv")
            write_atomic(table, "\n".join(lines) + "\n")
            written.append(os.path.basename(table))
            written.append(
                os.path.basename(
                    plots.ultracontractivity_figure(rows, os.path.join(out_dir, "bounds.svg"))
                )
            )
        if "constant_package" in artifacts:
            pkg = artifacts["constant_package"]
            body = json.dumps(
                {k: float(v) for k, v in pkg.items()}, indent=1, sort_keys=True
            )
            path = os.path.join(out_dir, "constants.json")
            write_atomic(path, body + "\n")
            written.append(os.path.basename(path))
        if "kappa_rows" in artifacts:
            rows = artifacts["kappa_rows"]
            lines = ["t,r,vol,bound,slack,hypothesis_ok"]
            lines += [
                f"{t:.17g},{r:.17g},{v:.17g},{b:.17g},{s:.17g},{str(h).lower()}"
                for t, r, v, b, s, h in rows
            ]
            table = os.path.join(out_dir, "kappa.csv")
            write_atomic(table, "\n".join(lines) + "\n")
            written.append(os.path.basename(table))
            written.append(
                os.path.basename(
                    plots.kappa_figure(rows, os.path.join(out_dir, "kappa.svg"))
                )
            )

    if all_reports:
        summary = os.path.join(out_dir, "summary.csv")
        write_summary_csv(summary, all_reports)
        written.append(os.path.basename(summary))

    manifest = {
        "config": cfg.to_dict(),
        "suites": suites,
        "files": sorted(written),
    }
    write_atomic(os.path.join(out_dir, "run_manifest.json"), json.dumps(manifest, indent=1, sort_keys=True) + "\n")

    failed = failures(all_reports)
    if failed:
        for name in failed:
            print(f"FAILED: {name}", file=sys.stderr)
        return 1
    return 0


def command_merge(args):
    try:
        rows = merge_report_files(args.files)
    except (OSError, ValueError) as exc:
        print(f"merge error: {exc}", file=sys.stderr)
        return 2
    text = _csv_rows(rows)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return command_run(args)
    return command_merge(args)


if __name__ == "__main__":
    sys.exit(main())
