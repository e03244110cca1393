"""Acceptance statistics: exact binomial confidence intervals and standard errors."""

import math

import numpy as np
from scipy.stats import beta

from src.core.config import CI_LEVEL


def clopper_pearson(k: int, n: int, level: float = CI_LEVEL) -> tuple[float, float]:
    """
    Exact two-sided binomial confidence interval for k successes in n trials.

    Raises:
        ValueError: If n < 1, k outside [0, n] or level outside (0, 1)
    """
    if n < 1:
        raise ValueError(f"Need at least one trial, got n={n}")
    if not 0 <= k <= n:
        raise ValueError(f"Successes k={k} outside [0, {n}]")
    if not 0 < level < 1:
        raise ValueError(f"Confidence level must lie in (0, 1), got {level}")

    alpha = 1 - level
    lower, upper = beta.ppf([alpha / 2, 1 - alpha / 2], [k, k + 1], [n - k + 1, n - k])
    # ppf is nan at the degenerate ends
    if np.isnan(lower):
        lower = 0.0
    if np.isnan(upper):
        upper = 1.0
    return float(min(lower, k / n)), float(max(upper, k / n))


def standard_error(p: float, n: int) -> float:
    """Standard error of a Bernoulli(p) mean over n draws."""
    if n < 1:
        raise ValueError(f"Need at least one trial, got n={n}")
    return math.sqrt(max(p * (1 - p), 0.0) / n)


def mean_standard_error(values: np.ndarray) -> float:
    """Standard error of the sample mean of ±1 (or any real) outcomes."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("inf")
    return float(np.std(values, ddof=1) / math.sqrt(values.size))
