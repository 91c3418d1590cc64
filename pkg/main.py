from __future__ import annotations

import sys
from argparse import ArgumentParser, Namespace
from importlib import import_module
from logging import DEBUG, INFO, WARNING, getLevelName, getLogger
from pathlib import Path
from typing import Optional, Sequence

import config
from tools.client import Context, init_logging
from tools.exceptions import (
    ComputationError,
    ExpressionSyntaxError,
    FracdevError,
    InputError,
    McFailureError,
)

log = getLogger("fracdev/main")

FEATURES = Path(__file__).parent / "features"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class FracdevCli:
    """Argument parsing, feature discovery and the error to exit code mapping."""

    parser: ArgumentParser

    def __init__(self) -> None:
        self.parser = ArgumentParser(
            prog=config.PROGRAM,
            description="Short-time expansions of fractional SDEs and their validation.",
        )
        self.parser.add_argument("--version", action="version", version=config.VERSION)
        self.parser.add_argument(
            "--seed", type=int, default=None, help="master seed, overrides seeds set in files"
        )
        self.parser.add_argument("--threads", type=int, default=1)
        self.parser.add_argument("--format", choices=("json", "text", "csv"), default="json")
        self.parser.add_argument("--out", default=None, help="output file, stdout by default")
        self.parser.add_argument("--log-file", default=config.LOGGING.FILE)
        verbosity = self.parser.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true")
        verbosity.add_argument("-q", "--quiet", action="store_true")
        self.subparsers = self.parser.add_subparsers(dest="command", metavar="command")
        self.subparsers.required = True
        self.load_features()

    def load_features(self) -> None:
        for feature in sorted(FEATURES.iterdir()):
            if not feature.is_dir():
                continue

            elif not (feature / "__init__.py").is_file():
                continue

            module = import_module(f"features.{feature.name}")
            setup = getattr(module, "setup", None)
            if setup is not None:
                setup(self.subparsers)

    @staticmethod
    def level(args: Namespace) -> int:
        if args.verbose:
            return DEBUG

        elif args.quiet:
            return WARNING

        return getLevelName(config.LOGGING.LEVEL) or INFO

    def on_error(self, args: Namespace, exc: Exception) -> int:
        if isinstance(exc, ExpressionSyntaxError):
            log.error(f"Expression error: {exc}")
            return EXIT_ERROR

        elif isinstance(exc, InputError):
            log.error(f"Invalid input: {exc}")
            return EXIT_ERROR

        elif isinstance(exc, McFailureError):
            log.error(f"Monte Carlo run aborted: {exc}")
            return EXIT_ERROR

        elif isinstance(exc, ComputationError):
            log.error(f"Computation failed: {exc}")
            return EXIT_ERROR

        elif isinstance(exc, FracdevError):
            log.error(f"{type(exc).__name__}: {exc}")
            return EXIT_ERROR

        log.exception(f"Unexpected exception in {args.command}.", exc_info=exc)
        return EXIT_ERROR

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        init_logging(self.level(args), args.log_file)
        ctx = Context(format=args.format, out=args.out, seed=args.seed, threads=args.threads)
        log.debug(f"Running {args.command} with {ctx!r}.")
        try:
            return args.handler(ctx, args)
        except Exception as exc:
            return self.on_error(args, exc)


def main(argv: Optional[Sequence[str]] = None) -> int:
    return FracdevCli().run(argv)


if __name__ == "__main__":
    sys.exit(main())
