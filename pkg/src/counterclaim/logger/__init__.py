"""
Logger module with custom log levels and formatting.

Colored console output, optional JSON-lines file logging, and the custom
levels FINE, SUCCESS and STEP on top of the standard Python levels.
"""

from .logger import (
    configure_logging,
    attach_run_context,
    FINE_LEVEL,
    STEP_LEVEL,
    SUCCESS_LEVEL,
    ConsoleFormatter,
    JsonLinesFormatter,
    RunContextFilter,
)

__all__ = [
    "configure_logging",
    "attach_run_context",
    "FINE_LEVEL",
    "STEP_LEVEL",
    "SUCCESS_LEVEL",
    "ConsoleFormatter",
    "JsonLinesFormatter",
    "RunContextFilter",
]
