"""Elapsed-time measures and decay weights for precursor contributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SECONDS_PER_DAY = 86400
DECAY_KINDS = ("exp", "linear", "none")


@dataclass(frozen=True)
class DecayParams:
    """Decay rate ``beta`` is per day; ``kind`` selects the weighting family.

    ``exp``    -- ``exp(-beta * days)``
    ``linear`` -- ``max(0, 1 - beta * days)``
    ``none``   -- constant 1
    """

    beta: float = 1 / 200
    kind: str = "exp"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.kind not in DECAY_KINDS:
            raise ValueError(f"unknown decay kind {self.kind!r}")


def delta_t_days(t0: int, last_activity: int, rating_time: int) -> float:
    """Two-anchor elapsed time ``|t0 - 2*last_activity + rating_time|`` in days.

    Penalizes both precursors that have gone quiet (``t0`` far past their last
    activity) and ratings that are old relative to the precursor's own last
    activity.
    """
    if not rating_time <= last_activity <= t0:
        raise ValueError(
            f"non-causal timestamps: need rating_time <= last_activity <= t0, "
            f"got {rating_time}, {last_activity}, {t0}")
    return abs(t0 - 2 * last_activity + rating_time) / SECONDS_PER_DAY


def delta_t_days_array(t0: int, last_activity: np.ndarray, rating_time: np.ndarray) -> np.ndarray:
    """Vectorized :func:`delta_t_days`; callers guarantee causality."""
    return np.abs(t0 - 2 * last_activity + rating_time) / SECONDS_PER_DAY


def decay_weight(delta_days: float, params: DecayParams = DecayParams()) -> float:
    if delta_days < 0 or math.isnan(delta_days):
        raise ValueError(f"negative elapsed time: {delta_days}")
    if params.kind == "exp":
        return math.exp(-params.beta * delta_days)
    if params.kind == "linear":
        return max(0.0, 1.0 - params.beta * delta_days)
    return 1.0


def decay_weights(delta_days: np.ndarray, params: DecayParams = DecayParams()) -> np.ndarray:
    if params.kind == "exp":
        return np.exp(-params.beta * delta_days)
    if params.kind == "linear":
        return np.maximum(0.0, 1.0 - params.beta * delta_days)
    return np.ones_like(delta_days, dtype=np.float64)
