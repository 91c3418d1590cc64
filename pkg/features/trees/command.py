from __future__ import annotations

from argparse import ArgumentParser, Namespace, _SubParsersAction
from logging import getLogger
from typing import Optional

import config
from tools.client import Context
from tools.formatter import plural, table

from .bracket import bracket_string
from .enumeration import enumerate_lts
from .models import LabelledTree

log = getLogger("fracdev/trees")


def record(tree: LabelledTree, noise_dim: Optional[int], hurst: Optional[float]) -> dict:
    out: dict = {
        "id": tree.ident,
        "l": tree.l,
        "d": tree.d,
        "s": tree.s,
        "bracket": bracket_string(tree),
        "label_word_template": list(tree.word_template()),
        "stratonovich": tree.is_stratonovich_class(),
    }
    if noise_dim is not None:
        out["assignments"] = noise_dim**tree.s

    if hurst is not None:
        out["rho"] = tree.stats(hurst).rho

    return out


def run(ctx: Context, args: Namespace) -> int:
    trees = enumerate_lts(args.max_nodes)
    if args.strato_only:
        trees = [t for t in trees if t.is_stratonovich_class()]

    records = [record(t, args.noise_dim, args.hurst) for t in trees]
    log.info(f"Emitting {plural(records):tree}.")
    columns = ("id", "l", "d", "s", "bracket", "label_word_template")
    ctx.emit(
        {"trees": records, "count": len(records)},
        table=table(
            "Labelled trees",
            columns,
            ([r[c] if c != "label_word_template" else ",".join(r[c]) for c in columns] for r in records),
        ),
        csv=(
            columns,
            ([r[c] if c != "label_word_template" else " ".join(r[c]) for c in columns] for r in records),
        ),
    )
    return 0


def register(subparsers: _SubParsersAction) -> ArgumentParser:
    parser = subparsers.add_parser("trees", help="enumerate labelled stochastic trees")
    parser.add_argument(
        "--max-nodes", type=int, default=3, help=f"at most {config.TREES.MAX_NODES}"
    )
    parser.add_argument("--noise-dim", type=int, default=None)
    parser.add_argument("--hurst", type=float, default=None)
    parser.add_argument(
        "--strato-only",
        action="store_true",
        help="keep only trees with an even number of stochastic nodes",
    )
    parser.set_defaults(handler=run)
    return parser
