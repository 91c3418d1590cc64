from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from pathlib import Path
from time import perf_counter
from typing import Any, Callable, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator
from rich.table import Table

from features.moments import MultiIndex
from tools import capture_time, fmtseconds, read_json
from tools.exceptions import FracdevError, InputError
from tools.formatter import human_join, plural, table

from .criteria import CRITERIA

log = getLogger("fracdev/harness")

__all__ = (
    "SuiteConfig",
    "SuiteRun",
    "CriterionResult",
    "SuiteReport",
    "load_suite_config",
    "run_suite",
)


class SuiteConfig(BaseModel):
    """
    Which criteria to run and how.

    `criteria` left unset selects every criterion of the profile; an empty
    list selects none. `moment_overrides` replaces moment table entries,
    keyed by comma separated words such as "1,1".
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    profile: Literal["quick", "full"] = "quick"
    criteria: Optional[tuple[str, ...]] = None
    seed: int = 0
    moment_overrides: dict[str, float] = {}

    @field_validator("moment_overrides")
    @classmethod
    def _words(cls, value: dict[str, float]) -> dict[str, float]:
        for key in value:
            MultiIndex.parse(key)

        return value

    def selected(self) -> list[str]:
        if self.criteria is None:
            return [
                name
                for name, item in CRITERIA.items()
                if self.profile == "full" or item.profile == "quick"
            ]

        unknown = [name for name in self.criteria if name not in CRITERIA]
        if unknown:
            raise InputError(f"unknown criteria: {human_join(unknown)}")

        return list(dict.fromkeys(self.criteria))

    def overrides(self) -> dict[tuple[int, ...], float]:
        return {MultiIndex.parse(k).word: float(v) for k, v in self.moment_overrides.items()}


def load_suite_config(source: str | Path | Mapping[str, Any] | None = None) -> SuiteConfig:
    if source is None:
        return SuiteConfig()

    data = source if isinstance(source, Mapping) else read_json(source)
    try:
        return SuiteConfig.model_validate(data)
    except ValidationError as exc:
        raise InputError(str(exc)) from None


class SuiteRun:
    """What a criterion sees of the suite: profile, seed, threads and the moment table."""

    __slots__ = ("quick", "seed", "threads", "word_overrides")

    def __init__(self, config: SuiteConfig, threads: int = 1):
        self.quick = config.profile == "quick"
        self.seed = config.seed
        self.threads = max(1, threads)
        self.word_overrides = config.overrides()

    def __repr__(self) -> str:
        return f"<SuiteRun quick={self.quick} seed={self.seed} threads={self.threads}>"

    def moment(self, word: tuple[int, ...], compute: Callable[[], float]) -> float:
        if word in self.word_overrides:
            return self.word_overrides[word]

        return compute()


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0
    error: Optional[str] = None

    def to_document(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "error": self.error,
            "details": self.details,
        }


@dataclass(frozen=True)
class SuiteReport:
    profile: str
    seed: int
    results: tuple[CriterionResult, ...]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failed(self) -> list[str]:
        return [result.name for result in self.results if not result.passed]

    def to_document(self) -> dict[str, Any]:
        return {
            "profile": self.profile,
            "seed": self.seed,
            "passed": self.passed,
            "failed": self.failed,
            "criteria": [result.to_document() for result in self.results],
        }

    def tables(self) -> list[Table]:
        return [
            table(
                f"Suite ({self.profile}, seed {self.seed})",
                ("criterion", "result", "time", "error"),
                (
                    (
                        r.name,
                        "[green]pass[/green]" if r.passed else "[red]FAIL[/red]",
                        fmtseconds(r.seconds, "milliseconds"),
                        r.error or "",
                    )
                    for r in self.results
                ),
            )
        ]


def _run_one(name: str, run: SuiteRun) -> CriterionResult:
    item = CRITERIA[name]
    start = perf_counter()
    try:
        with capture_time(f"Criterion {name}", log):
            passed, details = item.run(run)
    except FracdevError as exc:
        log.error(f"Criterion {name} raised {type(exc).__name__}: {exc}")
        error = f"{type(exc).__name__}: {exc}"
        return CriterionResult(name, False, {}, perf_counter() - start, error)

    if not passed:
        log.warning(f"Criterion {name} failed.")

    return CriterionResult(name, bool(passed), details, perf_counter() - start)


def run_suite(config: Optional[SuiteConfig] = None, *, threads: int = 1) -> SuiteReport:
    """Run the selected criteria in order; a failing criterion never stops the others."""

    config = config or SuiteConfig()
    names = config.selected()
    run = SuiteRun(config, threads)
    if run.word_overrides:
        log.info(f"Moment table overridden for {len(run.word_overrides)} words.")

    results = tuple(_run_one(name, run) for name in names)
    report = SuiteReport(config.profile, config.seed, results)
    passed = len(results) - len(report.failed)
    log.info(f"Suite: {passed} of {plural(results):criterion|criteria} passed.")
    if report.failed:
        log.warning(f"Failed: {human_join(report.failed)}.")

    return report
