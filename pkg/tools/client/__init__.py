from __future__ import annotations

from .context import Context, OutputFormat
from .logging import init_logging

__all__ = (
    "Context",
    "OutputFormat",
    "init_logging",
)
