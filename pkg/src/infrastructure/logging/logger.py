import logging
import os
import sys
from typing import Final, Optional, Union

from src.infrastructure.config import LOG_LEVEL_ENV

LOG_FORMAT: Final[str] = (
    "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)


def resolve_level(level: Optional[Union[int, str]] = None) -> int:
    """Numeric log level from ``level`` or the environment, INFO by default."""
    raw = level if level is not None else os.getenv(LOG_LEVEL_ENV, "INFO")
    if isinstance(raw, int):
        return raw
    resolved = logging.getLevelName(raw.strip().upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logger(
    name: str, level: Optional[Union[int, str]] = None
) -> logging.Logger:
    logger = logging.getLogger(name)
    numeric = resolve_level(level)
    logger.setLevel(numeric)

    # stdout carries command results, logs go to stderr
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(numeric)
        formatter = logging.Formatter(LOG_FORMAT)
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger


def set_global_level(level: Union[int, str]) -> None:
    """Retune every logger created through ``setup_logger`` (``--verbose``)."""
    numeric = resolve_level(level)
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.name.startswith("src."):
            logger.setLevel(numeric)
            for handler in logger.handlers:
                handler.setLevel(numeric)
