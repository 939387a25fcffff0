"""Logging setup shared by the CLI and the selftest."""
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from painleve_gap.consts import DEFAULT_BACKUP_COUNT, DEFAULT_MAX_BYTES, ENCODING

LOG_FORMAT = "%(asctime)s [%(threadName)s] %(levelname)s %(name)s: %(message)s"


def verbosity_level(verbose: bool = False, quiet: bool = False) -> int:
    """
    Log level selected by the --verbose and --quiet flags.

    :param verbose: Show solver diagnostics
    :type verbose: bool
    :param quiet: Only warnings and errors
    :type quiet: bool
    :return: Logging level
    :rtype: int
    """
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return logging.INFO


def create_logger(
    name: str, level: int = logging.INFO, log_file: Optional[Path] = None
) -> logging.Logger:
    """
    Create the package logger.

    Handlers of an earlier call for the same name are closed and replaced.
    Records go to stderr, stdout is left to the CSV and JSON output.
    numpy and scipy warnings (step size, conditioning) are routed into
    the log through the "py.warnings" logger.

    :param name: Name of the logger
    :type name: str
    :param level: Log level of the logger
    :type level: int
    :param log_file: Optional. File to save the logs to in addition to stderr.
    :type log_file: Optional[Path]
    :return: Logger with the given name and level
    :rtype: logging.Logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    handlers = [build_stream_handler()]
    if log_file is not None:
        handlers.append(build_rotating_file_handler(log_file))
    _replace_handlers(logger, handlers)
    logging.captureWarnings(True)
    _replace_handlers(logging.getLogger("py.warnings"), handlers)
    if log_file is not None:
        logger.debug("Logs are saved in %s", log_file)
    return logger


def build_stream_handler() -> logging.StreamHandler:
    """Stderr handler."""
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    return stream_handler


def build_rotating_file_handler(log_file: Path) -> RotatingFileHandler:
    """Rotating file handler, created with its parent directory."""
    log_file.parent.mkdir(exist_ok=True, parents=True)
    file_handler = RotatingFileHandler(
        log_file,
        encoding=ENCODING,
        maxBytes=DEFAULT_MAX_BYTES,
        backupCount=DEFAULT_BACKUP_COUNT,
    )
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    return file_handler


def _replace_handlers(logger: logging.Logger, handlers):
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        if handler not in handlers:
            handler.close()
    for handler in handlers:
        logger.addHandler(handler)
