"""
Logging configuration for the J-structure verification toolkit.
"""
import os
import sys
import time
from typing import Optional

from loguru import logger

from config.settings import LOG_DIR, LOG_LEVEL, LOG_RETENTION, LOG_ROTATION

COMPONENTS = ("category", "universe", "csystem", "verification")


def setup_logging(level: Optional[str] = None):
    """
    Configure the application logging system.

    Sets up loguru logger with:
    - Console output on stderr, so reports written to stdout stay clean
    - A daily application log with rotation, retention and compression
    - One file per core component, selected by module name
    - A separate error log with backtraces

    Args:
        level: Override for LOG_LEVEL

    Returns:
        The configured logger
    """
    level = (level or LOG_LEVEL).upper()

    logger.remove()

    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        level=level,
        colorize=True,
    )

    log_file = os.path.join(LOG_DIR, f"jcs_{time.strftime('%Y%m%d')}.log")
    logger.add(
        log_file,
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}",
        level=level,
        rotation=LOG_ROTATION,
        retention=LOG_RETENTION,
        compression="zip",
    )

    for component in COMPONENTS:
        logger.add(
            os.path.join(LOG_DIR, f"{component}.log"),
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {message}",
            level=level,
            filter=lambda record, component=component: f"core.{component}" in record["name"],
            rotation=LOG_ROTATION,
            retention=LOG_RETENTION,
        )

    logger.add(
        os.path.join(LOG_DIR, "errors.log"),
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}",
        level="ERROR",
        rotation=LOG_ROTATION,
        retention=LOG_RETENTION,
        backtrace=True,
        diagnose=True,
    )

    logger.info(f"Logging initialized with level: {level}")
    logger.debug(f"Log files directory: {LOG_DIR}")

    return logger
