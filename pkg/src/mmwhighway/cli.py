"""Command-line front end: theory curves, simulation runs and validation gates.

Exit codes: 0 success, 1 validation gate exceeded, 2 configuration error.
"""

import argparse
import dataclasses
import sys

from .harness import (
    ConfigError,
    PRESETS,
    emit_csv,
    load_config,
    mse_gate_failures,
    parse_config,
    run_experiment,
)

_THEORY = {"P_T_theory", "R_C_theory", "P_L_theory"}
_SIM = {"P_T_sim", "R_C_sim", "P_L_sim"}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mmwhighway",
        description="mmWave highway coverage: analytical curves and Monte Carlo "
        "validation. Angles are degrees and gains dB in configs and sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("theory", "evaluate analytical curves only"),
        ("simulate", "run the Monte Carlo estimator only"),
        ("validate", "run theory and simulation, check MSE gates"),
        ("sweep", "run whatever curves the config requests"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="JSON experiment config")
        cmd.add_argument("--preset", default="paper_defaults", choices=PRESETS)
        cmd.add_argument("--seed", type=int, help="override the simulation seed")
        cmd.add_argument("--trials", type=int, help="override the trial count")
        cmd.add_argument("--out", default="results.csv", help="output CSV path")
        cmd.add_argument("--workers", type=int, default=1)
    return parser


def _load(args):
    if args.config:
        experiment = load_config(args.config)
    else:
        experiment = parse_config({"preset": args.preset})
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    if overrides:
        experiment = dataclasses.replace(
            experiment, sim=dataclasses.replace(experiment.sim, **overrides)
        )
    return experiment


def _restrict_curves(experiment, allowed, command):
    curves = tuple(c for c in experiment.curves if c in allowed)
    if not curves:
        raise ConfigError(
            f"{command} requires at least one of {sorted(allowed)} in `curves`"
        )
    return dataclasses.replace(experiment, curves=curves)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        experiment = _load(args)
        if args.command == "theory":
            experiment = _restrict_curves(experiment, _THEORY, "theory")
        elif args.command == "simulate":
            experiment = _restrict_curves(experiment, _SIM, "simulate")
        elif args.command == "validate":
            needed = set(experiment.curves) | _pair_completion(experiment.curves)
            experiment = dataclasses.replace(experiment, curves=tuple(needed))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    rows = run_experiment(experiment, n_workers=args.workers)
    emit_csv(rows, args.out)
    for row in rows:
        if row.curve.startswith("MSE("):
            print(f"{row.curve} = {row.value:.6g}")
    print(f"wrote {len(rows)} rows to {args.out}")

    if args.command == "validate":
        failures = mse_gate_failures(rows, experiment.gates)
        if failures:
            for row in failures:
                print(
                    f"gate exceeded: {row.curve} = {row.value:.6g} "
                    f"> {experiment.gates['mse']:.6g}",
                    file=sys.stderr,
                )
            return 1
    return 0


def _pair_completion(curves):
    extra = set()
    for theory, sim in (
        ("P_T_theory", "P_T_sim"),
        ("R_C_theory", "R_C_sim"),
        ("P_L_theory", "P_L_sim"),
    ):
        if theory in curves or sim in curves:
            extra.update((theory, sim))
    return extra


if __name__ == "__main__":
    sys.exit(main())
