from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger

from tools import capture_time
from tools.client import Context

from .generator import sample
from .models import Grid
from .paths import csv_rows, holder_profile

log = getLogger("fracdev/fbm")


def run(ctx: Context, args: Namespace) -> int:
    grid = Grid(args.horizon, args.steps)
    with capture_time(f"Sampled {args.dim} fBm components on {grid}", log):
        path = sample(args.hurst, grid, args.dim, ctx.seed_or(0))

    header = ("time", *(f"B{i}" for i in range(1, path.d + 1)))
    if ctx.format == "json" and str(ctx.out or "").endswith(".csv"):
        ctx.format = "csv"

    ctx.emit(
        {
            "hurst": path.H,
            "steps": grid.steps,
            "T": grid.T,
            "seed": path.seed,
            "times": grid.times,
            "values": path.values,
            "holder": holder_profile(path, min(path.H, 0.99) * 0.9),
        },
        csv=(header, csv_rows(path)),
    )
    return 0


def register(subparsers: _SubParsersAction) -> ArgumentParser:
    parser = subparsers.add_parser("simulate-path", help="sample an fBm path on a uniform grid")
    parser.add_argument("--hurst", type=float, required=True)
    parser.add_argument("--steps", type=int, default=1024)
    parser.add_argument("--dim", type=int, default=1)
    parser.add_argument("--horizon", "-T", type=float, default=1.0)
    parser.set_defaults(handler=run)
    return parser
