"""Utility functions for sample-size arithmetic and vector checks."""
import math
from typing import Iterable, Sequence

import numpy as np

from graphbandit.exceptions import ModelViolationError

# Relative slack absorbed before rounding up, so that values such as
# 8 * ln(e**2) = 16.000000000000004 do not round to 17
_CEIL_SLACK = 1e-9


def ceil_count(value: float) -> int:
    """Round a real-valued sample size up to an integer pull count.

    Args:
        value: Non-negative real sample size

    Returns:
        Smallest integer >= value, ignoring floating-point noise

    Examples:
        >>> ceil_count(16.000000000000004)
        16
        >>> ceil_count(1.2)
        2
    """
    if value <= 0:
        return 0
    return int(math.ceil(value - _CEIL_SLACK * max(1.0, abs(value))))


def phase_count(n: int) -> int:
    """Number of halving phases for n nodes, ceil(log2 n), at least 1.

    Examples:
        >>> phase_count(15)
        4
        >>> phase_count(2)
        1
    """
    if n < 2:
        return 1
    return max(1, int(math.ceil(math.log2(n) - _CEIL_SLACK)))


def edge_key(i: int, j: int):
    """Canonical (lower, higher) key of an undirected edge."""
    return (i, j) if i < j else (j, i)


def hoeffding_maximal_bound(threshold: float, ranges: Iterable[float]) -> float:
    """Right-hand side of Hoeffding's maximal inequality.

    P(max_k S_k > threshold) <= exp(-threshold^2 / sum (b_i - a_i)^2)
    for independent zero-mean summands X_i in [a_i, b_i].

    Args:
        threshold: Exceedance level for the partial sums
        ranges: Widths b_i - a_i of each summand

    Returns:
        The bound, capped at 1.0
    """
    total = sum(float(r) ** 2 for r in ranges)
    if total <= 0:
        return 0.0
    return min(1.0, math.exp(-threshold ** 2 / total))


def as_unit_vector(x: Sequence[float], tolerance: float = 1e-9) -> np.ndarray:
    """Convert to a float vector and check that it has unit norm.

    Raises:
        ModelViolationError: If the norm differs from 1 beyond tolerance
    """
    vector = np.asarray(x, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > tolerance:
        raise ModelViolationError(f"Context must have unit norm, got norm {norm:.6g}")
    return vector


def binomial_standard_error(rate: float, trials: int) -> float:
    """Standard error of an empirical rate over independent trials."""
    if trials <= 0:
        return 0.0
    rate = min(max(rate, 0.0), 1.0)
    return math.sqrt(rate * (1.0 - rate) / trials)
