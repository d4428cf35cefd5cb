"""Fixed-timestamp, dataset-centered train/test splitting.

A single global timestamp separates every user's past (train) from future
(test).  The timestamp is chosen among the distinct interaction timestamps to
maximize the number of users with enough history on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from timepop.model import Dataset, Interaction

BOUNDARIES = ("test", "train")


@dataclass(frozen=True)
class SplitSpec:
    """``boundary`` says which side an interaction exactly at ``split_time`` falls on."""

    split_time: int
    min_train: int = 15
    min_test: int = 5
    boundary: str = "test"

    def __post_init__(self):
        if self.min_train < 1 or self.min_test < 1:
            raise ValueError("min_train and min_test must be >= 1")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")


@dataclass(frozen=True)
class SplitResult:
    train: list[Interaction]
    test: list[Interaction]
    evaluated_users: frozenset
    split_time: int
    train_dataset: Dataset


class InfeasibleSplit(ValueError):
    pass


def _in_train(times: np.ndarray, split_time: int, boundary: str) -> np.ndarray:
    return times <= split_time if boundary == "train" else times < split_time


def _per_user_counts(dataset: Dataset, split_time: int, boundary: str):
    past = _in_train(dataset.u_times, split_time, boundary)
    n_past = np.add.reduceat(past.astype(np.int64), dataset.u_indptr[:-1])
    n_all = np.diff(dataset.u_indptr)
    return n_past, n_all - n_past


def eligible_mask(dataset: Dataset, split_time: int, min_train: int = 15, min_test: int = 5,
                  boundary: str = "test") -> np.ndarray:
    n_past, n_future = _per_user_counts(dataset, split_time, boundary)
    return (n_past >= min_train) & (n_future >= min_test)


def count_eligible_users(dataset: Dataset, candidate_time: int, min_train: int = 15,
                         min_test: int = 5, boundary: str = "test") -> int:
    """Users with at least ``min_train`` past and ``min_test`` future interactions."""
    return int(eligible_mask(dataset, candidate_time, min_train, min_test, boundary).sum())


def eligibility_curve(dataset: Dataset, min_train: int = 15, min_test: int = 5,
                      boundary: str = "test") -> tuple[np.ndarray, np.ndarray]:
    """Eligible-user count at every distinct interaction timestamp.

    For a user with sorted timestamps ``ts`` (length ``m``) and the default
    boundary, eligibility holds exactly for ``ts[min_train-1] < t <= ts[m-min_test]``,
    so the curve is a sum of interval indicators built with a difference array.
    """
    grid = np.unique(dataset.u_times)
    diff = np.zeros(len(grid) + 1, dtype=np.int64)
    starts, ends = dataset.u_indptr[:-1], dataset.u_indptr[1:]
    ok = (ends - starts) >= min_train + min_test
    lo_t = dataset.u_times[starts[ok] + min_train - 1]
    hi_t = dataset.u_times[ends[ok] - min_test]
    if boundary == "train":
        # ts[min_train-1] <= t < ts[m-min_test]
        lo = np.searchsorted(grid, lo_t, side="left")
        hi = np.searchsorted(grid, hi_t, side="left")
    else:
        lo = np.searchsorted(grid, lo_t, side="right")
        hi = np.searchsorted(grid, hi_t, side="right")
    valid = hi > lo
    np.add.at(diff, lo[valid], 1)
    np.add.at(diff, hi[valid], -1)
    return grid, np.cumsum(diff[:-1])


def find_best_split(dataset: Dataset, min_train: int = 15, min_test: int = 5,
                    boundary: str = "test") -> SplitSpec:
    """Earliest distinct timestamp maximizing :func:`count_eligible_users`."""
    grid, counts = eligibility_curve(dataset, min_train, min_test, boundary)
    best = int(np.argmax(counts))
    if counts[best] == 0:
        raise InfeasibleSplit("no feasible split")
    return SplitSpec(int(grid[best]), min_train, min_test, boundary)


def apply_split(dataset: Dataset, spec: SplitSpec) -> SplitResult:
    """Partition interactions at ``spec.split_time``.

    Train keeps every user's past, evaluated or not; test holds only the
    future of evaluated users.
    """
    evaluated = eligible_mask(dataset, spec.split_time, spec.min_train, spec.min_test, spec.boundary)
    if not evaluated.any():
        raise InfeasibleSplit(f"no evaluated users at split time {spec.split_time}")
    past = _in_train(dataset.u_times, spec.split_time, spec.boundary)
    rows = np.repeat(np.arange(dataset.n_users), np.diff(dataset.u_indptr))
    test_keep = ~past & evaluated[rows]
    all_x = list(dataset.interactions())
    train = [x for x, p in zip(all_x, past.tolist()) if p]
    test = [x for x, k in zip(all_x, test_keep.tolist()) if k]
    users = frozenset(dataset.user_ids[u] for u in np.flatnonzero(evaluated))
    return SplitResult(train, test, users, spec.split_time, dataset.subset(past))
