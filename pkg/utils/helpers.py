"""
Helper utilities for the verification toolkit.
"""
import datetime
import hashlib
from typing import Any

import numpy as np


def to_jsonable(value: Any) -> Any:
    """
    Render a value built from tuples, sets, numpy scalars and core objects as JSON data.

    Core objects expose ``describe()``; anything else falls back to ``repr``.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, (set, frozenset)):
        return sorted((to_jsonable(item) for item in value), key=repr)
    describe = getattr(value, "describe", None)
    if callable(describe):
        return to_jsonable(describe())
    return repr(value)


def stable_digest(value: Any) -> str:
    """Hex digest of ``repr(value)``; unlike ``hash`` it does not change between runs."""
    return hashlib.sha256(repr(value).encode("utf-8")).hexdigest()


def get_timestamp() -> str:
    return datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
