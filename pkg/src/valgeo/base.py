"""Small shared numerics: ball volumes and Monte-Carlo estimates."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class Estimate(NamedTuple):
    """A scalar together with its Monte-Carlo standard error.

    Exact computations carry ``stderr == 0.0``.
    """

    value: float
    stderr: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def unit_ball_volume(d: int) -> float:
    """Volume kappa_d of the d-dimensional unit Euclidean ball (kappa_0 = 1)."""
    if d < 0:
        raise ValueError(f"negative dimension {d}")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def mean_and_stderr(samples: np.ndarray) -> Estimate:
    """Sample mean and standard error of the mean."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    if n == 1:
        return Estimate(float(x[0]), 0.0)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)))
