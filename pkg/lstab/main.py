import argparse
import logging
import logging.config
import sys
from typing import Optional, Sequence

from lstab.config import LOG_CONFIG, LOG_LEVEL
from lstab.errors import ConfigError, LStabError

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1 like every other configuration error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def setup_logging(verbose: bool = False) -> None:
    if LOG_CONFIG.exists():
        logging.config.fileConfig(str(LOG_CONFIG), disable_existing_loggers=False)
    else:
        logging.basicConfig(level=LOG_LEVEL, format="%(levelname)-5.5s [%(name)s] %(message)s")
    logging.getLogger("lstab").setLevel(logging.DEBUG if verbose else LOG_LEVEL)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="lstab", description="Local stability of ranked items")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Register command modules
    from lstab.commands import baseline, dense, ranking, stability, synth

    for module in (ranking, stability, dense, synth, baseline):
        module.register(subparsers)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        setup_logging(args.verbose)
        return args.handler(args)
    except LStabError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit as e:
        # --help
        return int(e.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
