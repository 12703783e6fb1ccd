import argparse

from gfdmlab import __version__
from gfdmlab.cli import converge, gen, solve, verify


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfdmlab",
        description="Meshfree GFDM operators and diffusion solvers on the unit square",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Overrides GFDM_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen.register(subparsers)
    solve.register(subparsers)
    converge.register(subparsers)
    verify.register(subparsers)
    return parser
