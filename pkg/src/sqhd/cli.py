"""Command-line interface: run experiments, validate the build, list registries.

Exit codes: 0 success; 1 validation-suite failure; 2 invalid config;
3 runtime invariant violation.
"""

import argparse
import json
import sys
from pathlib import Path

from .harness import ConfigError, build_experiment, load_config, run_experiment
from .lindblad import InvariantViolation
from .metrics import DEFAULT_DELTA
from .objectives import OBJECTIVES
from .presets import PRESETS
from .schedules import SCHEDULES
from .validate import SUITES, run_suites


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sqhd",
        description="Split-step simulator and benchmark harness for stochastic "
        "quantum Hamiltonian descent",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment from a config file or preset")
    run.add_argument("--config", type=Path, help="flat key = value config file")
    run.add_argument("--preset", help="embedded preset name (see `sqhd list`)")
    run.add_argument("--out", type=Path, help="output directory (default sqhd-out/<name>)")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--threads", type=int, default=1, help="worker threads across runs")

    val = sub.add_parser("validate", help="run a built-in validation suite")
    val.add_argument("suite", choices=sorted(SUITES) + ["all"])
    val.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    sub.add_parser("list", help="list objectives, schedules, and presets")
    return parser


def _cmd_run(args):
    if args.config is None and args.preset is None:
        print("error: provide --config and/or --preset", file=sys.stderr)
        return 2
    try:
        if args.config is not None:
            values, lines = load_config(args.config)
            if args.preset is not None:
                values.setdefault("preset", args.preset)
        else:
            values, lines = {"preset": args.preset}, {}
        exp = build_experiment(values, lines, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out if args.out is not None else Path("sqhd-out") / exp.name
    try:
        summary = run_experiment(exp, out_dir, threads=max(1, args.threads))
    except (InvariantViolation, FloatingPointError) as exc:
        print(f"runtime invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out_dir}/summary.json")
    if exp.mode == "weak-approx":
        rep = summary["report"]
        print(
            f"max trace distance: eta={rep['max_trace_distance']['eta']:.3e} "
            f"eta/2={rep['max_trace_distance']['eta_half']:.3e} "
            f"empirical order {rep['empirical_order']:.2f}"
        )
    else:
        for entry in summary["runs"]:
            print(
                f"  {entry['run_id']}: final loss {entry['final_expected_loss']:.4g}, "
                f"success {entry['final_success_prob']:.3f}"
            )
    return 0


def _cmd_validate(args):
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    report = run_suites(names)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    if not report["passed"]:
        print(f"FAILED checks: {', '.join(report['failed_checks'])}", file=sys.stderr)
        return 1
    return 0


def _cmd_list():
    print("objectives:")
    for name in sorted(OBJECTIVES):
        delta = DEFAULT_DELTA.get(name)
        extra = f" (default delta {delta})" if delta is not None else ""
        print(f"  {name}{extra}")
    print("schedules:")
    for name in sorted(SCHEDULES):
        print(f"  {name}")
    print("presets:")
    for name, cfg in sorted(PRESETS.items()):
        desc = ", ".join(
            f"{k}={cfg[k]}" for k in ("objective", "n_r", "T", "N") if k in cfg
        )
        print(f"  {name}: {desc}")
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_list()


if __name__ == "__main__":
    sys.exit(main())
