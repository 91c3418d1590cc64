import logging
import sys
from datetime import datetime
from logging import LogRecord
from logging.handlers import RotatingFileHandler
from typing import Iterable, Optional

import rich
from rich._log_render import LogRender  # DEP-WARN
from rich.console import Console, ConsoleRenderable
from rich.highlighter import NullHighlighter
from rich.logging import RichHandler
from rich.style import Style
from rich.text import Text
from rich.theme import Theme
from rich.traceback import Traceback  # DEP-WARN

LOGGER_PREFIX = "fracdev/"
NAME_WIDTH = 10


class FracdevLogRender(LogRender):
    """Column layout: time, level, short logger name, message."""

    def __call__(
        self,
        console: Console,
        renderables: Iterable[ConsoleRenderable],
        log_time: Optional[datetime] = None,
        time_format: Optional[str] = None,
        level: Text | str = "",
        path: Optional[str] = None,
        line_no: Optional[int] = None,
        link_path: Optional[str] = None,
        logger_name: Optional[str] = None,
    ) -> Text:
        output = Text()
        if self.show_time:
            log_time = log_time or console.get_datetime()
            stamp = log_time.strftime(time_format or str(self.time_format))
            if stamp == self._last_time:
                output.append(" " * (len(stamp) + 1))
            else:
                output.append(f"{stamp} ", style="log.time")
                self._last_time = stamp  # type: ignore

        if self.show_level:
            output.append(level)
            output.append(" " * (8 - len(level)))

        if logger_name:
            short = logger_name.removeprefix(LOGGER_PREFIX)
            output.append(f"[{short}] ", style="#BBAAEE")
            output.append(" " * max(0, NAME_WIDTH - len(short)))

        for renderable in renderables:
            output.append(renderable)  # type: ignore

        return output


class FracdevRichHandler(RichHandler):
    """Rich handler that shows the logger name in place of the source path."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._log_render = FracdevLogRender(
            show_time=self._log_render.show_time,
            show_level=self._log_render.show_level,
            show_path=False,
            level_width=self._log_render.level_width,
        )

    def get_level_text(self, record: LogRecord) -> Text:
        level_text = super().get_level_text(record)
        level_text.stylize("bold")
        return level_text

    def emit(self, record: LogRecord) -> None:
        message = self.format(record)
        if self.rich_tracebacks and record.exc_info and record.exc_info[0]:
            message = record.getMessage()

        use_markup = getattr(record, "markup", self.markup)
        message_text = Text.from_markup(message) if use_markup else Text(message)
        self.console.print(
            self._log_render(
                self.console,
                [message_text],
                log_time=datetime.fromtimestamp(record.created),
                time_format=None if self.formatter is None else self.formatter.datefmt,
                level=self.get_level_text(record),
                logger_name=record.name,
            ),
            soft_wrap=True,
        )
        if self.rich_tracebacks and record.exc_info and record.exc_info[0]:
            exc_type, exc_value, exc_traceback = record.exc_info
            self.console.print(
                Traceback.from_exception(
                    exc_type, exc_value, exc_traceback, show_locals=False, max_frames=20
                )
            )


def init_logging(level: int, logfile: Optional[str] = None) -> None:
    """
    Configure the root logger.

    Console output goes to stderr so that command output on stdout stays
    machine readable. A rotating file handler is added when `logfile` is set.
    """

    rich.reconfigure(tab_size=4, stderr=True)
    console = rich.get_console()
    console.push_theme(
        Theme(
            {
                "log.time": Style(dim=True),
                "logging.level.warning": Style(color="yellow", bold=True),
                "logging.level.critical": Style(color="white", bgcolor="red", bold=True),
            }
        )
    )
    console.file = sys.stderr

    handler = FracdevRichHandler(
        console=console,
        rich_tracebacks=True,
        highlighter=NullHighlighter(),
    )
    handler.setFormatter(logging.Formatter("{message}", datefmt="(%X)", style="{"))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)

    root.addHandler(handler)
    root.setLevel(level)
    logging.captureWarnings(True)

    if logfile:
        file_handler = RotatingFileHandler(
            logfile,
            encoding="utf-8",
            mode="w",
            maxBytes=32 * 1024 * 1024,
            backupCount=3,
        )
        file_handler.setFormatter(
            logging.Formatter("[{asctime}] {levelname:<8} {name}: {message}", style="{")
        )
        root.addHandler(file_handler)
