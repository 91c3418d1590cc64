from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger

import config
from features.fbm import Grid, sample
from features.symbolic import load_experiment
from tools.client import Context

from .schemes import solve

log = getLogger("fracdev/solver")


def run(ctx: Context, args: Namespace) -> int:
    experiment = load_experiment(args.spec)
    spec = experiment.spec
    spec.warn_unbounded()
    scheme = args.scheme or experiment.mc.resolved_scheme(spec.H)
    seed = ctx.seed_or(experiment.mc.seed)
    path = sample(spec.H, Grid(spec.T, args.steps), spec.d, seed)
    trajectory = solve(spec, path, scheme)
    if ctx.format == "json" and str(ctx.out or "").endswith(".csv"):
        ctx.format = "csv"

    header = ("time", *(f"X{i}" for i in range(1, spec.n + 1)))
    ctx.emit(
        {"spec": spec.to_document(), "seed": seed, **trajectory.to_document()},
        csv=(header, trajectory.rows()),
    )
    return 0


def register(subparsers: _SubParsersAction) -> ArgumentParser:
    parser = subparsers.add_parser("solve", help="solve the SDE pathwise along one fBm sample")
    parser.add_argument("spec", help="experiment JSON file")
    parser.add_argument("--steps", type=int, default=1024)
    parser.add_argument("--scheme", choices=config.SOLVER.SCHEMES, default=None)
    parser.set_defaults(handler=run)
    return parser
