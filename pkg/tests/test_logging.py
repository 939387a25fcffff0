import logging
import warnings

import pytest

from painleve_gap.logging import create_logger, verbosity_level


@pytest.fixture(autouse=True)
def release_warnings():
    yield
    logging.captureWarnings(False)
    warnings_logger = logging.getLogger("py.warnings")
    for handler in list(warnings_logger.handlers):
        warnings_logger.removeHandler(handler)
        handler.close()


def test_handlers_are_replaced(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    create_logger("painleve_gap.test", logging.DEBUG, log_file)
    logger = create_logger("painleve_gap.test", logging.DEBUG, log_file)
    assert len(logger.handlers) == 2
    logger.info("first message")
    for handler in logger.handlers:
        handler.flush()
    text = log_file.read_text()
    assert text.count("first message") == 1
    assert "INFO painleve_gap.test: first message" in text


def test_stream_only():
    logger = create_logger("painleve_gap.test_stream", logging.WARNING)
    assert len(logger.handlers) == 1
    assert logger.level == logging.WARNING


def test_warnings_reach_the_log_file(tmp_path):
    log_file = tmp_path / "warnings.log"
    logger = create_logger("painleve_gap.test_warnings", logging.INFO, log_file)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.warn("step size too small", RuntimeWarning)
    for handler in logger.handlers:
        handler.flush()
    assert "step size too small" in log_file.read_text()


@pytest.mark.parametrize(
    ["verbose", "quiet", "level"],
    [
        (False, False, logging.INFO),
        (True, False, logging.DEBUG),
        (False, True, logging.WARNING),
        (True, True, logging.DEBUG),
    ],
)
def test_verbosity_level(verbose, quiet, level):
    assert verbosity_level(verbose, quiet) == level
