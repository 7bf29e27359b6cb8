import os
import json
import logging
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

load_dotenv()

# ------------------------------------------------------
#                 Custom levels
# ------------------------------------------------------
FINE_LEVEL = 15
SUCCESS_LEVEL = 22
STEP_LEVEL = 25

logging.addLevelName(FINE_LEVEL, "FINE")
logging.addLevelName(SUCCESS_LEVEL, "SUCCESS")
logging.addLevelName(STEP_LEVEL, "STEP")


def _level_method(level: int):
    def log_at(self, message, *args, **kwargs):
        if self.isEnabledFor(level):
            self._log(level, message, args, **kwargs)

    return log_at


logging.Logger.fine = _level_method(FINE_LEVEL)
logging.Logger.success = _level_method(SUCCESS_LEVEL)
logging.Logger.step = _level_method(STEP_LEVEL)

DEFAULT_LOG_LEVEL = FINE_LEVEL

# Record attributes the CLI attaches to every record of a run
RUN_FIELDS = ("run_id", "command")


# ------------------------------------------------------
#         Terminal format
# ------------------------------------------------------
class ConsoleFormatter(logging.Formatter):
    level_formats = {
        logging.DEBUG: "\x1b[38;21mDEBUG\x1b[0m:\t  %(message)s",  # Grey
        FINE_LEVEL: "\x1b[34mFINE\x1b[0m:\t  %(message)s",  # Blue
        logging.INFO: "\x1b[32mINFO\x1b[0m:\t  %(message)s",  # Green
        SUCCESS_LEVEL: "\x1b[32m★ SUCCESS\x1b[0m:  \x1b[32m%(message)s\x1b[0m",
        STEP_LEVEL: "\x1b[35mSTEP\x1b[0m:\t  \x1b[35m%(message)s\x1b[0m",  # Purple
        logging.WARNING: "\x1b[33mWARNING\x1b[0m:  %(message)s",  # Yellow
        logging.ERROR: "\x1b[31mERROR\x1b[0m:\t  %(message)s",  # Red
        logging.CRITICAL: "\x1b[31;1mCRITICAL\x1b[0m: %(message)s",  # Bold red
    }

    def format(self, record):
        log_fmt = self.level_formats.get(record.levelno, "%(levelname)s: %(message)s")
        formatted = logging.Formatter(log_fmt).format(record)
        command = getattr(record, "command", None)
        if command:
            formatted = f"{formatted} \x1b[90m[{command}]\x1b[0m"
        return formatted


# ------------------------------------------------------
#         File format: one JSON object per record
# ------------------------------------------------------
class JsonLinesFormatter(logging.Formatter):
    """
    Formats records as single-line JSON so training runs can be parsed later.

    Keys: time (UTC ISO-8601), level, logger, message, source, plus any of
    RUN_FIELDS present on the record and the exception text when there is one.
    """

    def format(self, record):
        payload = {
            "time": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "source": f"{record.filename}:{record.lineno}",
        }
        for field in RUN_FIELDS:
            value = getattr(record, field, None)
            if value is not None:
                payload[field] = value
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False)


class RunContextFilter(logging.Filter):
    """Stamps run_id and command onto every record passing through a handler."""

    def __init__(self, run_id: str, command: str):
        super().__init__()
        self.run_id = run_id
        self.command = command

    def filter(self, record):
        record.run_id = self.run_id
        record.command = self.command
        return True


def _resolve_level(log_level: Optional[Union[int, str]]) -> int:
    if log_level is None:
        raw = os.getenv("COUNTERCLAIM_LOG_LEVEL", os.getenv("LOG_LEVEL", str(DEFAULT_LOG_LEVEL)))
        log_level = raw
    if isinstance(log_level, str):
        if log_level.isdigit():
            return int(log_level)
        resolved = logging.getLevelName(log_level.upper())
        return resolved if isinstance(resolved, int) else DEFAULT_LOG_LEVEL
    return int(log_level)


def configure_logging(
    logger_name: str = "counterclaim",
    log_level: Optional[Union[int, str]] = None,
    keep_logs: bool = False,
    log_dir: Union[str, Path] = "logs",
) -> logging.Logger:
    """
    Configure and return a logger with the counterclaim formatting.

    Args:
        logger_name: Name of the logger, normally the module's __name__.
        log_level: Level as int or name. None reads COUNTERCLAIM_LOG_LEVEL, then
            LOG_LEVEL, then defaults to FINE.
        keep_logs: Also write JSON lines to <log_dir>/counterclaim.jsonl.
        log_dir: Directory for the log file.

    Returns:
        The configured logger. Calling again with the same name does not
        duplicate handlers.
    """
    level = _resolve_level(log_level)
    logger = logging.getLogger(logger_name)
    logger.setLevel(level)

    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(ConsoleFormatter())
        logger.addHandler(console_handler)

    if keep_logs and not any(isinstance(h, RotatingFileHandler) for h in logger.handlers):
        log_path = Path(log_dir)
        log_path.mkdir(exist_ok=True, parents=True)
        file_handler = RotatingFileHandler(
            log_path / "counterclaim.jsonl", maxBytes=5 * 1024 * 1024, backupCount=3
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(JsonLinesFormatter())
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def attach_run_context(run_id: str, command: str, prefix: str = "counterclaim") -> None:
    """
    Add a RunContextFilter to every handler of every configured counterclaim logger.

    Loggers created after this call are not affected; the CLI calls it once all
    subpackages have been imported.
    """
    context_filter = RunContextFilter(run_id=run_id, command=command)
    for name, candidate in logging.Logger.manager.loggerDict.items():
        if not isinstance(candidate, logging.Logger) or not name.startswith(prefix):
            continue
        for handler in candidate.handlers:
            if not any(isinstance(f, RunContextFilter) for f in handler.filters):
                handler.addFilter(context_filter)
