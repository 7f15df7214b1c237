import logging
import os
import sys

import coloredlogs

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
log_level = getattr(logging, LOG_LEVEL, logging.DEBUG)
# stdout carries the result JSON, so logs go to stderr
coloredlogs.install(
    level=log_level,
    fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

from valfield.cli import run


def main() -> int:
    """Main entry point"""
    try:
        return run(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130


if __name__ == "__main__":
    sys.exit(main())
