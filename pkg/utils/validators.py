"""
Input validation utilities for the command line.
"""
import argparse
from typing import List

from loguru import logger

from config.settings import MAX_THREADS


def validate_numeric_range(value: int, minimum: int, maximum: int) -> bool:
    """
    Validate numeric value is within range.

    Args:
        value: Numeric value to validate
        minimum: Minimum allowed value
        maximum: Maximum allowed value

    Returns:
        True if valid, False otherwise
    """
    return minimum <= value <= maximum


def validate_suite_selector(selector: str, choices: List[str]) -> bool:
    """
    Validate a suite selector: "all" or a comma separated list of suite names.

    Args:
        selector: Value of --suite
        choices: Known suite names

    Returns:
        True if valid, False otherwise
    """
    if selector == "all":
        return True
    names = [name.strip() for name in selector.split(",")]
    unknown = [name for name in names if name not in choices]
    if unknown:
        logger.warning(f"Unknown suite names in selector: {', '.join(unknown)}")
    return bool(names) and not unknown


def non_negative_int(text: str) -> int:
    """argparse type for bounds and seeds."""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def thread_count(text: str) -> int:
    """argparse type for --threads, between 1 and four times MAX_THREADS."""
    value = non_negative_int(text)
    if not validate_numeric_range(value, 1, 4 * MAX_THREADS):
        raise argparse.ArgumentTypeError(f"thread count must be between 1 and {4 * MAX_THREADS}")
    return value
