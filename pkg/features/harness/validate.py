from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional, Sequence

from rich.table import Table

from features.expansion import evaluate, expand
from features.symbolic import McConfig, MomentSettings, SdeSpec
from tools.exceptions import InputError
from tools.formatter import exact, table

from .estimate import mc_estimate
from .slopes import SlopeFit, check_time_grid, remainder_slope

log = getLogger("fracdev/harness")

__all__ = ("DEFAULT_TIMES", "ValidationReport", "validate", "stderr_scaling")

DEFAULT_TIMES: tuple[float, ...] = (0.4, 0.3, 0.2, 0.15, 0.1)


@dataclass(frozen=True)
class ValidationReport:
    """Monte Carlo against every truncated expansion per t, and one slope fit per order."""

    rows: tuple[dict[str, Any], ...]
    fits: dict[int, SlopeFit]
    scheme: str

    def to_document(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "rows": list(self.rows),
            "fits": {str(m): fit.to_document() for m, fit in self.fits.items()},
        }

    def tables(self) -> list[Table]:
        orders = sorted(self.fits)
        rows = table(
            f"Monte Carlo ({self.scheme}) against the expansion",
            ("t", "mc", "±", *(f"m={m}" for m in orders)),
            (
                (
                    f"{row['t']:g}",
                    exact(row["mc_mean"]),
                    f"{row['mc_stderr']:.1e}",
                    *(exact(row["expansion"][str(m)]) for m in orders),
                )
                for row in self.rows
            ),
        )
        fits = table(
            "Remainder slopes",
            ("m", "slope", "target", "status"),
            (
                (
                    m,
                    "-" if fit.slope is None else f"{fit.slope:.3f}",
                    f"{fit.target:.3f}",
                    fit.status,
                )
                for m, fit in self.fits.items()
            ),
        )
        return [rows, fits]


def validate(
    spec: SdeSpec,
    cfg: McConfig,
    orders: Sequence[int],
    *,
    t_values: Optional[Sequence[float]] = None,
    moments: Optional[MomentSettings] = None,
    threads: int = 1,
) -> ValidationReport:
    if not orders:
        raise InputError("validation needs at least one expansion order")

    times = check_time_grid(t_values or cfg.t_values or tuple(t * spec.T for t in DEFAULT_TIMES))
    moments = moments or MomentSettings()
    mc = mc_estimate(spec, cfg, t_values=times, threads=threads)
    full = expand(
        spec,
        max(orders),
        method=moments.method,
        tol=moments.tol,
        paths=moments.paths,
        steps=moments.steps,
        seed=cfg.seed,
        threads=threads,
    )
    truncated = {m: full.truncate(m) for m in sorted(set(orders))}
    rows = []
    for t in times:
        point = mc.at(t)
        values = {str(m): evaluate(e, t) for m, e in truncated.items()}
        rows.append(
            {
                "t": t,
                "mc_mean": point.mean,
                "mc_stderr": point.stderr,
                "failed": point.failed,
                "expansion": values,
                "difference": {m: abs(point.mean - v) for m, v in values.items()},
            }
        )

    fits = {
        m: remainder_slope(spec, m, times, cfg, mc=mc, expansion=e, threads=threads)
        for m, e in truncated.items()
    }
    return ValidationReport(tuple(rows), fits, mc.scheme)


def stderr_scaling(
    spec: SdeSpec,
    cfg: McConfig,
    doublings: int = 2,
    *,
    t: Optional[float] = None,
    threads: int = 1,
) -> list[float]:
    """
    Ratios of successive standard errors when the path count grows fourfold
    each time; independent sampling gives ratios near 1/2.
    """

    if doublings < 1:
        raise InputError("need at least one doubling")

    t = spec.T if t is None else t
    errors = []
    for k in range(doublings + 1):
        scaled = cfg.model_copy(update={"paths": cfg.paths * 4**k})
        errors.append(mc_estimate(spec, scaled, t_values=(t,), threads=threads).points[0].stderr)

    return [b / a for a, b in zip(errors, errors[1:])]
