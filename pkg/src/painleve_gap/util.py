"""Utility methods."""
import os
from typing import List, Optional

import numpy as np

from painleve_gap.consts import THREADS_ENV_VAR
from painleve_gap.exceptions import ConfigError


def value_or_none(value: Optional[str]) -> Optional[str]:
    """Return string value if not empty. Otherwise, returns None."""
    if value is None or value.strip() == "":
        return None
    return value.strip()


def parse_grid(text: str) -> List[float]:
    """
    Parse a grid given either as ``a:b:n`` or as a comma separated list.

    :param text: Grid description
    :type text: str
    :return: Grid values
    :rtype: List[float]
    :raises ConfigError: if the grid is malformed or empty
    """
    text = text.strip()
    if text == "":
        raise ConfigError("Empty grid")
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n_points = int(count)
            if n_points < 1:
                raise ConfigError(f'Grid "{text}" has no points')
            grid = np.linspace(float(start), float(stop), n_points)
            return [float(value) for value in grid]
        values = [float(item) for item in text.split(",") if item.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f'Cannot parse grid "{text}"') from exc
    if len(values) == 0:
        raise ConfigError(f'Grid "{text}" has no points')
    return values


def thread_count(requested: Optional[int] = None) -> int:
    """Number of worker threads, capped by the environment variable."""
    cap_text = value_or_none(os.environ.get(THREADS_ENV_VAR))
    cap = os.cpu_count() or 1
    if cap_text is not None:
        try:
            cap = max(1, int(cap_text))
        except ValueError as exc:
            raise ConfigError(
                f"{THREADS_ENV_VAR} should be a positive integer, got {cap_text}"
            ) from exc
    if requested is None:
        return cap
    return max(1, min(requested, cap))


def smooth_max(first, second, width: float = 1.0):
    """Smooth version of max(first, second)."""
    return 0.5 * (first + second + np.sqrt((first - second) ** 2 + width**2))
