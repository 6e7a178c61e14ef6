"""``ftealu run <experiment>`` command line."""
from __future__ import annotations

import argparse
import sys

from .errors import FtealuError
from .experiments import EXPERIMENTS, ExperimentSpec, run_experiment
from .training import DEFAULT_CAP, FAULT_CLASSES
from .word import AluOp


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _ops(text: str) -> tuple[AluOp, ...]:
    try:
        return tuple(AluOp.parse(x) for x in _csv_list(text))
    except FtealuError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _samples(text: str):
    if text.lower() == "exhaustive":
        return "exhaustive"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("samples must be an integer or 'exhaustive'")
    if n < 1:
        raise argparse.ArgumentTypeError("samples must be >= 1")
    return n


def _faults(text: str) -> tuple[str, ...]:
    classes = _csv_list(text)
    bad = [c for c in classes if c not in FAULT_CLASSES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown fault classes {bad}; choose from {', '.join(FAULT_CLASSES)}")
    return classes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftealu", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser(
        "run", help="run one experiment and write its CSV",
        description="Run an experiment. Omitted flags take the experiment's defaults: "
                    "exp-combos w=4 exhaustive and w=16 x100; exp-voters and exp-robustness w=4 exhaustive; "
                    "exp-learned and exp-add-compare w=16 x400; exp-convergence and exp-5mr w=16.")
    run.add_argument("experiment", choices=EXPERIMENTS)
    run.add_argument("--width", type=int, help="operand width in bits (even, <= 32)")
    run.add_argument("--samples", type=_samples, help="operand pairs, or 'exhaustive'")
    run.add_argument("--seed", type=int, default=1, help="splitmix64 seed (default 1)")
    run.add_argument("--ops", type=_ops, help="comma list of AND,OR,XOR,NOT,ADD,SUB (default all)")
    run.add_argument("--combo", help="combo number 1-6, '5mr', or comma list of transforms (default 6)")
    run.add_argument("--scheme", choices=["punishment", "reward-punishment"],
                     help="scoring scheme (default reward-punishment)")
    run.add_argument("--norm", choices=["minmax", "absmin-shift", "standard", "standard-rectified"],
                     help="weight normalization (default standard)")
    run.add_argument("--folds", type=int, default=10, help="cross-validation folds (default 10)")
    run.add_argument("--faults", type=_faults, help=f"comma list of {','.join(FAULT_CLASSES)} (default single,double)")
    run.add_argument("--sweep", type=lambda t: tuple(int(x) for x in _csv_list(t)),
                     help="sample counts for exp-convergence (default 25,50,100,150,200,300)")
    run.add_argument("--out", default="-", help="CSV path, '-' for stdout (default)")
    run.add_argument("--effective-only", action="store_true",
                     help="score only scenarios where some version's result differs from golden")
    run.add_argument("--cap", type=int, default=DEFAULT_CAP,
                     help=f"refuse datasets above this many judged bits (default {DEFAULT_CAP})")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ExperimentSpec(
            args.experiment, width=args.width, samples=args.samples, seed=args.seed, ops=args.ops,
            combo=args.combo, scheme=args.scheme, norm=args.norm, folds=args.folds,
            effective_only=args.effective_only, cap=args.cap, faults=args.faults,
            sweep=args.sweep, out=args.out)
        result = run_experiment(spec)
    except FtealuError as exc:
        print(f"ftealu: error: {exc}", file=sys.stderr)
        return 2
    if args.out == "-":
        sys.stdout.write(result.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
