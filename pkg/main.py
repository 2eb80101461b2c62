import logging
import sys

import config
from lab.cli import main as cli_main

# Set up logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
)
logger = logging.getLogger(__name__)


def main():
    """Entry point for the lab command line"""
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
