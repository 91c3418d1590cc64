from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger

from features.symbolic import load_experiment
from tools.client import Context

from .suite import load_suite_config, run_suite
from .validate import validate

log = getLogger("fracdev/harness")


def run_validate(ctx: Context, args: Namespace) -> int:
    experiment = load_experiment(args.spec)
    spec = experiment.spec
    spec.warn_unbounded()
    cfg = experiment.mc.model_copy(update={"seed": ctx.seed_or(experiment.mc.seed)})
    orders = args.orders or [experiment.expansion.order]
    result = validate(
        spec,
        cfg,
        orders,
        t_values=args.times,
        moments=experiment.moments,
        threads=ctx.threads,
    )
    for m, fit in result.fits.items():
        if fit.status == "inconclusive":
            ctx.warn(f"slope fit for order {m} is inconclusive")

    orders = sorted(result.fits)
    ctx.emit(
        {"spec": spec.to_document(), "seed": cfg.seed, **result.to_document()},
        table=result.tables(),
        csv=(
            ("t", "mc_mean", "mc_stderr", *(f"expansion_m{m}" for m in orders)),
            (
                (
                    row["t"],
                    row["mc_mean"],
                    row["mc_stderr"],
                    *(row["expansion"][str(m)] for m in orders),
                )
                for row in result.rows
            ),
        ),
    )
    return 0


def run_suite_command(ctx: Context, args: Namespace) -> int:
    config = load_suite_config(args.config)
    update = {} if ctx.seed is None else {"seed": ctx.seed}
    if args.profile is not None:
        update["profile"] = args.profile

    if args.criteria is not None:
        update["criteria"] = tuple(args.criteria)

    report = run_suite(config.model_copy(update=update), threads=ctx.threads)
    ctx.emit(
        report.to_document(),
        table=report.tables(),
        csv=(
            ("criterion", "passed", "seconds", "error"),
            ((r.name, r.passed, r.seconds, r.error or "") for r in report.results),
        ),
    )
    return 0 if report.passed else 1


def register(subparsers: _SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "validate", help="Monte Carlo against truncated expansions with remainder slopes"
    )
    parser.add_argument("spec", help="experiment JSON file")
    parser.add_argument("--orders", type=int, nargs="+", default=None)
    parser.add_argument("--times", type=float, nargs="+", default=None)
    parser.set_defaults(handler=run_validate)

    parser = subparsers.add_parser("suite", help="run the acceptance criteria")
    parser.add_argument("config", nargs="?", default=None, help="suite JSON file")
    parser.add_argument("--profile", choices=("quick", "full"), default=None)
    parser.add_argument("--criteria", nargs="*", default=None, help="names to run")
    parser.set_defaults(handler=run_suite_command)
