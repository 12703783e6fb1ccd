import argparse

from gfdmlab.cli.solve import METHOD_CHOICES, add_operator_options
from gfdmlab.common.enums import ReconstructionScheme
from gfdmlab.common.rendering import render
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import define_test_case
from gfdmlab.core.benchmark.convergence import estimate_orders, run_convergence, write_results


def float_list(value: str) -> list[float]:
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {value!r}") from exc


def method_list(value: str) -> list[str]:
    methods = [part.strip() for part in value.split(",") if part.strip()]
    unknown = [m for m in methods if m not in METHOD_CHOICES]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHOD_CHOICES)}"
        )
    return methods


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("converge", help="Convergence sweep over h for several methods")
    parser.add_argument("--case", type=int, required=True, help="Test case 1-5")
    parser.add_argument("--methods", type=method_list, required=True, help="e.g. fvm,mls2,ddo2")
    parser.add_argument("--h-list", type=float_list, default=None, help="e.g. 0.16,0.08,0.04")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", required=True, help="Results CSV path")
    add_operator_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    case = define_test_case(args.case)
    scheme = ReconstructionScheme(args.recon) if args.recon else case.default_scheme
    rows = run_convergence(
        case.case_id,
        args.methods,
        scheme,
        h_list=args.h_list,
        seed=args.seed,
        dd_correction=args.dd,
        analytic_gradients=args.analytic_gradients,
        workers=args.workers,
    )
    write_results(rows, args.out)
    failed = sum(1 for row in rows if not row.is_valid)
    print(
        render(
            "order_summary.txt.j2",
            case_id=case.case_id,
            seed=args.seed,
            estimates=estimate_orders(rows),
            failed=failed,
        ),
        end="",
    )
    return 0
