"""Command line entry point: one subcommand per scenario.

Exit status is 0 when every verdict of the run passes, 1 when some verdict
fails and 2 on configuration or numerical errors.
"""

from __future__ import annotations

import argparse
import sys

from corrmem.report import emit_report
from corrmem.scenarios import SCENARIOS, RunSpec, run


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrmem", description="Dark-state polariton memory scenarios.")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration document")
        p.add_argument("--time", type=float, dest="T", help="storage duration T")
        p.add_argument("--steps", type=int, help="propagator steps (default max(2000, 20 T))")
        p.add_argument("--out", help="output path stem for <out>.csv / <out>.json")
        p.add_argument("--fock-cutoff", type=int, dest="fock_cutoff")
        p.add_argument("--sweep", type=_floats, help="T grid, e.g. 100,200,400")
        p.add_argument("--alpha0", type=_floats, help="input amplitude(s)")
        p.add_argument("--beta0", type=float)
        p.add_argument("--sign", type=int, choices=(1, -1))
        p.add_argument("--phi", type=_floats, help="target mixing angles (radians)")
        p.add_argument("--epsilon", type=float, help="weak/strong control ratio")
        p.add_argument("--omega-max", type=float, dest="omega_max")
        p.add_argument("--weak", type=_names, default=("E1",), help="weak-control ensembles (crossline)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-trace", action="store_false", dest="trace")
    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    fields = dict(vars(args))
    return RunSpec(**fields)


def print_verdicts(report, stream=None) -> None:
    stream = stream or sys.stdout
    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        print(f"{mark} {v.criterion} {v.name}: {v.value:.6g} {v.relation} {v.threshold:.3g}", file=stream)


def print_table(report, stream=None) -> None:
    stream = stream or sys.stdout
    print("  ".join(f"{c:>14}" for c in report.columns), file=stream)
    for row in report.rows:
        print("  ".join(f"{x:>14.6g}" for x in row), file=stream)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        report = run(spec)
    except ValueError as exc:
        mod = type(exc).__module__.split(".")[-1]
        print(f"error [{mod}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if spec.out:
        for path in emit_report(report, spec.out):
            print(f"wrote {path}")
    if spec.scenario == "verify":
        print_table(report)
    print_verdicts(report)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
