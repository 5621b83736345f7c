"""Logging configuration for sinkatlas."""

import logging
import os
import sys
from pathlib import Path

LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}


def resolve_log_level(verbose: bool = False) -> int:
    """
    Work out the console log level.

    Args:
        verbose: Force DEBUG regardless of the environment

    Returns:
        A logging level constant; SINKATLAS_LOG picks it, WARNING otherwise
    """
    if verbose:
        return logging.DEBUG
    name = os.getenv("SINKATLAS_LOG", "WARNING").strip().upper()
    return LEVELS.get(name, logging.WARNING)


def setup_logging(verbose: bool = False, log_to_disk: bool | None = None) -> None:
    """
    Set up logging configuration for sinkatlas.

    Args:
        verbose: Enable verbose console logging (DEBUG level)
        log_to_disk: Enable disk logging. If None, reads SINKATLAS_LOG_TO_DISK
    """
    log_level = resolve_log_level(verbose)

    if log_to_disk is None:
        log_to_disk = os.getenv("SINKATLAS_LOG_TO_DISK", "false").lower() == "true"

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    # stdout carries reports, so logs go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
    )
    root_logger.addHandler(console_handler)

    if log_to_disk:
        logs_dir = Path("logs")
        logs_dir.mkdir(exist_ok=True)

        log_file = logs_dir / "sinkatlas.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
        )
        root_logger.addHandler(file_handler)
        root_logger.setLevel(logging.DEBUG)

        logging.getLogger(__name__).info(f"Disk logging enabled. Log file: {log_file}")

    _configure_logger_levels(log_level)


def _configure_logger_levels(log_level: int) -> None:
    """Configure specific logger levels for different components."""
    logging.getLogger("pydot").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("sinkatlas").setLevel(log_level)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger for the given name.

    Args:
        name: Logger name below the package, e.g. "cli.analyze"

    Returns:
        Configured logger instance
    """
    return logging.getLogger(f"sinkatlas.{name}")


def log_command_start(command_name: str, args: dict, logger: logging.Logger) -> None:
    """Log the start of a command execution."""
    shown = {k: v for k, v in args.items() if v is not None}
    logger.debug(f"Starting command '{command_name}' with args: {shown}")


def log_command_end(command_name: str, success: bool, logger: logging.Logger) -> None:
    """Log the end of a command execution."""
    status = "completed successfully" if success else "failed"
    logger.debug(f"Command '{command_name}' {status}")


def log_file_operation(
    operation: str,
    file_path: str,
    logger: logging.Logger,
    **kwargs,
) -> None:
    """
    Log a file operation.

    Args:
        operation: Type of operation (read, write)
        file_path: Path to the file
        logger: Logger instance to use
        **kwargs: Additional context to log
    """
    context = " ".join([f"{k}={v}" for k, v in kwargs.items() if v is not None])
    logger.debug(f"File {operation}: {file_path} - {context}")
