import argparse

from gfdmlab.common.enums import Method, ReconstructionScheme
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import define_test_case
from gfdmlab.core.benchmark.service import solve_case
from gfdmlab.core.mls.io import save_operator
from gfdmlab.core.pointcloud.io import format_float, load_cloud
from gfdmlab.core.solver.io import save_solution

METHOD_CHOICES = [m.value for m in Method]
SCHEME_CHOICES = [s.value for s in ReconstructionScheme]


def dd_flag(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected 'on' or 'off', got {value!r}")
    return value == "on"


def add_operator_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--recon",
        choices=SCHEME_CHOICES,
        default=None,
        help="Diffusivity reconstruction (default: am, hm for the interface cases)",
    )
    parser.add_argument(
        "--dd",
        type=dd_flag,
        default=None,
        metavar="on|off",
        help="Diagonal-dominance correction (default: on for order 2, off for order 4)",
    )
    parser.add_argument(
        "--analytic-gradients",
        action="store_true",
        help="Use the closed-form diffusivity gradient instead of the discrete one",
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("solve", help="Solve one test case on one cloud")
    parser.add_argument("--case", type=int, required=True, help="Test case 1-5")
    parser.add_argument("--method", choices=METHOD_CHOICES, required=True)
    parser.add_argument("--h", type=float, required=True, help="Target smoothing length")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--cloud", default=None, help="Use this cloud CSV instead of generating")
    parser.add_argument("--out", default=None, help="Solution CSV path")
    parser.add_argument("--operator-out", default=None, help="Write the operator as i,j,value")
    add_operator_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    case = define_test_case(args.case)
    scheme = ReconstructionScheme(args.recon) if args.recon else case.default_scheme
    cloud = load_cloud(args.cloud) if args.cloud else None
    solution = solve_case(
        case,
        args.method,
        scheme,
        args.h,
        args.seed,
        dd_correction=args.dd,
        analytic_gradients=args.analytic_gradients,
        cloud=cloud,
    )
    if args.out:
        save_solution(solution.cloud, solution.u_h, solution.u_ref, args.out)
    if args.operator_out:
        save_operator(solution.operator, args.operator_out)
    print(f"error={format_float(solution.summary.error)}")
    return 0
