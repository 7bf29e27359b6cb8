import io
import json
import logging
import sys

import pytest

from counterclaim.logger import (
    FINE_LEVEL,
    STEP_LEVEL,
    SUCCESS_LEVEL,
    ConsoleFormatter,
    JsonLinesFormatter,
    RunContextFilter,
    attach_run_context,
    configure_logging,
)


@pytest.fixture
def captured():
    """A logger writing through ConsoleFormatter into a StringIO."""
    logger = logging.getLogger("counterclaim.test_console")
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
    stream = io.StringIO()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(ConsoleFormatter())
    logger.addHandler(handler)
    logger.setLevel(FINE_LEVEL)
    yield logger, stream
    logger.removeHandler(handler)
    handler.close()


def close_handlers(logger):
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()


def test_custom_log_levels():
    """Custom levels are registered in order FINE < INFO < SUCCESS < STEP."""
    assert logging.getLevelName(FINE_LEVEL) == "FINE"
    assert logging.getLevelName(SUCCESS_LEVEL) == "SUCCESS"
    assert logging.getLevelName(STEP_LEVEL) == "STEP"
    assert FINE_LEVEL < logging.INFO < SUCCESS_LEVEL < STEP_LEVEL

    logger = logging.getLogger("test")
    assert hasattr(logger, "fine")
    assert hasattr(logger, "step")
    assert hasattr(logger, "success")


def test_console_output(captured):
    """Custom level methods reach the console with their labels."""
    logger, stream = captured

    logger.fine("Building postings")
    logger.step("Training scorer")
    logger.success("Saved index")

    output = stream.getvalue()
    assert "FINE" in output and "Building postings" in output
    assert "STEP" in output and "Training scorer" in output
    assert "SUCCESS" in output and "Saved index" in output


def test_command_suffix(captured):
    """Records carrying a command show it after the message."""
    logger, stream = captured
    logger.handlers[0].addFilter(RunContextFilter(run_id="abc123", command="index"))

    logger.info("Indexed 10 documents")

    assert "Indexed 10 documents \x1b[90m[index]\x1b[0m" in stream.getvalue()


def test_level_from_environment(monkeypatch):
    """COUNTERCLAIM_LOG_LEVEL sets the level when none is passed."""
    monkeypatch.setenv("COUNTERCLAIM_LOG_LEVEL", "warning")

    logger = configure_logging("counterclaim.test_env_level")

    assert logger.level == logging.WARNING
    close_handlers(logger)


def test_no_duplicate_handlers():
    """Configuring the same logger twice keeps one console handler."""
    first = configure_logging("counterclaim.test_repeat", log_level=logging.INFO)
    second = configure_logging("counterclaim.test_repeat", log_level=logging.INFO)

    assert first is second
    assert len(second.handlers) == 1
    close_handlers(second)


def test_file_logging(tmp_path):
    """keep_logs writes one JSON object per record with the run context."""
    # Setup
    log_dir = tmp_path / "logs"
    logger = configure_logging("counterclaim.test_file", log_level=logging.INFO, keep_logs=True, log_dir=log_dir)
    attach_run_context("run42", "train-retriever")

    # Execute
    logger.info("Epoch 1 loss 0.52")
    for handler in logger.handlers:
        handler.flush()

    # Verify
    lines = (log_dir / "counterclaim.jsonl").read_text(encoding="utf-8").strip().splitlines()
    record = json.loads(lines[-1])
    assert record["message"] == "Epoch 1 loss 0.52"
    assert record["level"] == "INFO"
    assert record["logger"] == "counterclaim.test_file"
    assert record["run_id"] == "run42"
    assert record["command"] == "train-retriever"
    close_handlers(logger)


def test_json_formatter_includes_exception():
    """Exception text is kept in the JSON record."""
    try:
        raise ValueError("bad checkpoint")
    except ValueError:
        record = logging.getLogger("x").makeRecord(
            "x", logging.ERROR, __file__, 1, "failed", (), exc_info=sys.exc_info()
        )

    payload = json.loads(JsonLinesFormatter().format(record))

    assert payload["message"] == "failed"
    assert "ValueError: bad checkpoint" in payload["exception"]
    assert "run_id" not in payload


def test_log_levels_filtering():
    """DEBUG is filtered out at INFO."""
    logger = configure_logging("counterclaim.test_levels", log_level=logging.INFO)
    stream = io.StringIO()
    logger.addHandler(logging.StreamHandler(stream))

    logger.debug("Debug message")
    logger.info("Info message")

    assert "Debug message" not in stream.getvalue()
    assert "Info message" in stream.getvalue()
    close_handlers(logger)
