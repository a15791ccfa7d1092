"""Command-line entry point.

Exit status is 0 on success, 1 when a computed value misses its tolerance
and 2 on bad input.  Tables are CSV; the one-line summary of a table goes to
stderr as ``# key=value ...`` so stdout stays a clean CSV stream.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report
from .bayes import BAYES_TOL
from .channel import channel_from_json
from .ensembles import SampleSpec
from .entropy import parse_log_base
from .errors import ChrononError
from .experiments import bayes_rows, povm_rows, scan_bitflip, scatter_quasi, scatter_sot
from .measures import CSV_HEADER, all_measures
from .mmalg import from_json
from .sot import LS, SYM_BLOOM, Process, SotKind
from .worked import EXAMPLES, run_example

EXIT_OK, EXIT_TOL, EXIT_INPUT = 0, 1, 2
POVM_TOL = 1e-9


class InputError(Exception):
    pass


def _sot(text: str) -> SotKind:
    try:
        return SotKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _base(text: str) -> float:
    try:
        return parse_log_base(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _summary(**fields) -> None:
    print("# " + " ".join(f"{k}={v}" for k, v in fields.items()), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sot", type=_sot, default=SYM_BLOOM,
                        help="state over time: sym-bloom (default), ls, right, left, compound, "
                             "p-bloom:P, sym-p-bloom:P, pqr:P,Q,R")
    common.add_argument("--log-base", type=_base, default=2.0, help="2 (default) or e")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol", type=float, default=None, help="residual tolerance override")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=_positive, default=1000)
    sampling.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="chronon", description="States over time and dynamical entropy measures.")
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", parents=[common], help="reproduce a worked example")
    ex.add_argument("name", help=", ".join(EXAMPLES))

    me = sub.add_parser("measures", parents=[common], help="measures of a process given as JSON")
    me.add_argument("process_file", help='JSON {"rho": element, "channel": channel}, or - for stdin')
    me.add_argument("--csv", action="store_true", help="emit a CSV row instead of JSON")

    sc = sub.add_parser("scan-bitflip", parents=[common], help="measures over the (r, lambda) grid")
    sc.add_argument("--grid", type=int, default=21)
    sc.add_argument("--figure", action=argparse.BooleanOptionalAction, default=True,
                    help="render a PNG next to --out")

    sa = sub.add_parser("scatter", parents=[common, sampling], help="entropy scatter data")
    sa.add_argument("mode", choices=["quasi", "sot"])
    sa.add_argument("--m", type=_positive, default=2)
    sa.add_argument("--d1", type=_positive, default=1)
    sa.add_argument("--d2", type=_positive, default=1)
    sa.add_argument("--d3", type=_positive, default=2)
    sa.add_argument("--na", type=_positive, default=2, help="quasi mode: first factor dimension")
    sa.add_argument("--nb", type=_positive, default=2, help="quasi mode: second factor dimension")
    sa.add_argument("--scale", type=float, default=3.0, help="quasi mode: entry range of the perturbation")
    sa.add_argument("--figure", action=argparse.BooleanOptionalAction, default=True,
                    help="render a PNG next to --out")

    sub.add_parser("bayes-check", parents=[common, sampling], help="sampled Bayes-map residuals")
    sub.add_parser("povm-check", parents=[common, sampling], help="sampled POVM theorem checks")
    return p


def cmd_example(args) -> int:
    rep = run_example(args.name, args.log_base)
    text = rep.text() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    failed = sum(not c.passed for c in rep.checks)
    _summary(example=args.name, checks=len(rep.checks), failed=failed)
    return EXIT_OK if rep.passed else EXIT_TOL


def _load_process(path: str) -> Process:
    try:
        raw = sys.stdin.read() if path == "-" else Path(path).read_text()
        obj = json.loads(raw)
        rho = from_json(obj["rho"])
        channel = channel_from_json(obj["channel"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read process from {path}: {exc}") from None
    return Process(rho, channel)


def cmd_measures(args) -> int:
    rep = all_measures(args.sot, _load_process(args.process_file), args.log_base)
    if args.csv:
        report.write_csv(CSV_HEADER, [rep.csv_row()], args.out)
    else:
        text = json.dumps(rep.to_dict(), indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_scan_bitflip(args) -> int:
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    rows = scan_bitflip(args.grid, args.sot, args.log_base)
    report.write_csv(("r", "lambda", "S", "H", "I", "K"), rows, args.out)
    if args.out and args.figure:
        report.bitflip_figure(rows, args.grid, report.figure_path(args.out), str(args.sot))
    _summary(rows=len(rows), sot=args.sot)
    return EXIT_OK


def cmd_scatter(args) -> int:
    if args.mode == "quasi":
        res = scatter_quasi(args.na, args.nb, args.samples, args.seed, args.scale, base=args.log_base)
        title = f"quasi-states {args.na}x{args.nb}, scale {args.scale:g}"
    else:
        spec = SampleSpec(args.m, args.d1, args.d2, args.d3, args.seed, args.samples)
        res = scatter_sot(spec, args.sot, args.log_base)
        title = f"{args.sot}, m={args.m} d1={args.d1} d2={args.d2} d3={args.d3}"
    report.write_csv(("index", "S_joint", "S_A_plus_S_B"), res.rows, args.out)
    if args.out and args.figure:
        labels = ("S(A) + S(B)", "S(AB)") if args.mode == "quasi" else ("S(rho) + S(E(rho))", "S(psi)")
        report.scatter_figure(res.rows, report.figure_path(args.out), title, *labels)
    fields = dict(samples=len(res.rows), subadditivity_violations=res.subadditivity_violations)
    if res.bound is not None:
        fields.update(bound_violations=res.bound_violations, bound=repr(res.bound))
    _summary(**fields)
    return EXIT_OK


def cmd_bayes_check(args) -> int:
    if args.sot not in (LS, SYM_BLOOM):
        raise InputError("bayes-check supports --sot ls or sym-bloom only")
    tol = BAYES_TOL if args.tol is None else args.tol
    rows = bayes_rows(args.sot, args.samples, args.seed, args.log_base)
    report.write_csv(("index", "m", "bayes_residual", "entropic_residual", "tp", "dagger", "cp"), rows, args.out)
    max_b = max(r[2] for r in rows)
    max_e = max(r[3] for r in rows)
    bad = sum(1 for r in rows if r[2] >= tol or r[3] >= tol or not r[4] or not r[5])
    _summary(samples=len(rows), max_bayes_residual=repr(float(max_b)), max_entropic_residual=repr(float(max_e)), failures=bad)
    return EXIT_OK if bad == 0 else EXIT_TOL


def cmd_povm_check(args) -> int:
    tol = POVM_TOL if args.tol is None else args.tol
    rows = povm_rows(args.samples, args.seed, args.log_base)
    report.write_csv(("index", "n", "p", "closed_form_gap", "clause", "label", "holds"), rows, args.out)
    max_gap = max(r[3] for r in rows)
    bad = sum(1 for r in rows if r[3] >= tol or not r[6])
    _summary(samples=len(rows), max_closed_form_gap=repr(float(max_gap)), failures=bad)
    return EXIT_OK if bad == 0 else EXIT_TOL


COMMANDS = {
    "example": cmd_example,
    "measures": cmd_measures,
    "scan-bitflip": cmd_scan_bitflip,
    "scatter": cmd_scatter,
    "bayes-check": cmd_bayes_check,
    "povm-check": cmd_povm_check,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ChrononError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
