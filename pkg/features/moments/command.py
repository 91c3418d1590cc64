from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger

from tools import capture_time
from tools.client import Context
from tools.formatter import exact, table

from .moments import expected_iterated_integral
from .words import MultiIndex

log = getLogger("fracdev/moments")


def run(ctx: Context, args: Namespace) -> int:
    word = MultiIndex.parse(args.alpha)
    with capture_time(f"E∫dB^({word}) at H={args.hurst}", log):
        result = expected_iterated_integral(
            word,
            args.hurst,
            tol=args.tol,
            method=args.method,
            paths=args.paths,
            steps=args.steps,
            seed=ctx.seed,
        )

    summary = table(
        f"E ∫ dB^({word}), H = {args.hurst}",
        ("value", "error", "method", "matchings"),
        [(exact(result.value), f"{result.error_estimate:.2e}", result.method, result.matchings)],
    )
    ctx.emit(
        {"alpha": list(word.word), "hurst": args.hurst, **result.to_document()},
        table=summary,
        csv=(
            ("alpha", "hurst", "value", "error_estimate", "method", "matchings"),
            [
                (
                    " ".join(map(str, word.word)),
                    args.hurst,
                    result.value,
                    result.error_estimate,
                    result.method,
                    result.matchings,
                )
            ],
        ),
    )
    return 0


def register(subparsers: _SubParsersAction) -> ArgumentParser:
    parser = subparsers.add_parser(
        "moment", help="expected iterated integral of fBm over the unit simplex"
    )
    parser.add_argument("--alpha", required=True, help="comma separated word, e.g. 1,0,1")
    parser.add_argument("--hurst", type=float, required=True)
    parser.add_argument("--method", choices=("pairing", "mc"), default="pairing")
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--paths", type=int, default=None, help="mc only")
    parser.add_argument("--steps", type=int, default=None, help="mc only")
    parser.set_defaults(handler=run)
    return parser
