import sys
import time
from collections.abc import Sequence

from gfdmlab.cli.router import build_parser
from gfdmlab.common.exceptions import GfdmError
from gfdmlab.common.logging import get_logger, setup_logging

logger = get_logger("main")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    start_time = time.perf_counter()
    try:
        code = args.handler(args)
    except GfdmError as exc:
        logger.error("%s failed | %s", args.command, exc.detail)
        print(f"error: {exc.detail}", file=sys.stderr)
        code = exc.exit_code
    duration_ms = (time.perf_counter() - start_time) * 1000

    logger.info("%s %d %.1fms", args.command, code, duration_ms)
    return code


if __name__ == "__main__":
    sys.exit(main())
