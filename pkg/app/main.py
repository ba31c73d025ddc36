import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app.application.common.exceptions import ConfigurationError
from app.cli.commands import configure_container, parse_args, run_command
from app.cli.error_handler import EXIT_USAGE, handle_exception
from app.container import Container

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


def dispatch(argv: Optional[Sequence[str]] = None, container: Optional[Container] = None) -> int:
    """Parse argv, run one subcommand and return its exit status."""
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    container = container or Container()
    try:
        configure_container(container, args)
        return run_command(container, args)
    except ValidationError as exc:
        return handle_exception(ConfigurationError(f"Invalid configuration file: {exc}"), args.command)
    except Exception as exc:
        return handle_exception(exc, args.command)


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
