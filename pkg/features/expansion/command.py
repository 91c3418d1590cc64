from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger

from features.symbolic import load_experiment
from tools.client import Context

from .engine import expand
from .report import report

log = getLogger("fracdev/expansion")


def run(ctx: Context, args: Namespace) -> int:
    experiment = load_experiment(args.spec)
    spec = experiment.spec
    spec.warn_unbounded()
    order = experiment.expansion.order if args.order is None else args.order
    settings = experiment.moments
    expansion = expand(
        spec,
        order,
        method=settings.method,
        tol=settings.tol,
        paths=settings.paths,
        steps=settings.steps,
        seed=ctx.seed_or(experiment.mc.seed),
        threads=ctx.threads,
        form=args.form,
    )
    prune_zero = args.prune_zero or experiment.expansion.prune_zero
    document, tables = report(expansion, prune_zero=prune_zero)
    ctx.emit(
        document,
        table=tables,
        csv=(
            ("tree", "assignment", "word", "coefficient", "moment", "moment_error", "exponent"),
            (
                (
                    t["bracket"],
                    " ".join(map(str, t["assignment"])),
                    " ".join(map(str, t["word"])),
                    t["coefficient"],
                    t["moment"],
                    t["moment_error"],
                    t["exponent"],
                )
                for t in document["terms"]
            ),
        ),
    )
    return 0


def register(subparsers: _SubParsersAction) -> ArgumentParser:
    parser = subparsers.add_parser("expand", help="tree expansion of E f(X_t) in powers of t")
    parser.add_argument("spec", help="experiment JSON file")
    parser.add_argument("--order", type=int, default=None, help="defaults to the file's setting")
    parser.add_argument("--prune-zero", action="store_true", help="hide zero-moment terms")
    parser.add_argument(
        "--form",
        choices=("trees", "words"),
        default="trees",
        help="one term per tree and assignment, or one per label word",
    )
    parser.set_defaults(handler=run)
    return parser
