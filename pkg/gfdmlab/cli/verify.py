import argparse

from gfdmlab.cli.converge import float_list
from gfdmlab.common.enums import VerificationSuite
from gfdmlab.common.exceptions import EXIT_NUMERICAL
from gfdmlab.config import settings
from gfdmlab.core.verification.report import run_verification, write_report


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="Run operator verification suites")
    parser.add_argument(
        "--suite",
        choices=[s.value for s in VerificationSuite],
        default=VerificationSuite.ALL.value,
    )
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument(
        "--h-list",
        type=float_list,
        default=None,
        help="Refinement levels (default: 0.16,0.08,0.04)",
    )
    parser.add_argument("--out", required=True, help="Report CSV path; text goes beside it")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    report = run_verification(args.suite, args.seed, args.h_list)
    _, text = write_report(report, args.out)
    print(text, end="")
    return 0 if report.passed else EXIT_NUMERICAL
