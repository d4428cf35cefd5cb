"""Domain types and the immutable, index-backed interaction dataset."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np

from timepop.decay import DecayParams

Id = Hashable
TauMode = Union[str, float]


class Interaction(NamedTuple):
    """One (user, item, rating, timestamp) event; timestamps are integer seconds."""

    user: Id
    item: Id
    rating: float
    timestamp: int


@dataclass(frozen=True)
class UserProfile:
    user: Id
    interactions: tuple[Interaction, ...]

    def __post_init__(self):
        if not self.interactions:
            raise ValueError(f"empty profile for user {self.user!r}")

    @property
    def last_activity(self) -> int:
        return self.interactions[-1].timestamp

    @property
    def items(self) -> set:
        return {x.item for x in self.interactions}

    def __len__(self):
        return len(self.interactions)

    def __iter__(self):
        return iter(self.interactions)


@dataclass(frozen=True)
class RecommendationContext:
    """Parameters for one recommendation pass.

    ``tau_mode`` is either ``"auto"`` (mean common-before count over the
    candidates) or a fixed numeric threshold.
    """

    t0: int
    top_n: int = 10
    decay: DecayParams = field(default_factory=DecayParams)
    tau_mode: TauMode = "auto"

    def __post_init__(self):
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")
        if self.tau_mode != "auto" and not (
                isinstance(self.tau_mode, (int, float)) and self.tau_mode > 0):
            raise ValueError(f"invalid tau mode {self.tau_mode!r}")


def id_key(x):
    """Total order over mixed integer/string ids: integers first, numerically."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return (0, int(x), "")
    return (1, 0, str(x))


def _sorted_ids(values) -> list:
    return sorted(set(values), key=id_key)


class Dataset:
    """Bidirectional user/item index over deduplicated interactions.

    User and item ids are interned to dense integer handles assigned in
    :func:`id_key` order, so handle order equals external-id order and the
    whole index is independent of input record order.

    Attributes (all read-only numpy arrays):
        u_indptr, u_items, u_times, u_ratings:
            CSR by user; each row sorted by (timestamp, item).
        i_indptr, i_users, i_times, i_ratings:
            CSR by item; each row sorted by (timestamp, user).
        pop:
            distinct-rater count per item handle.
        last_activity:
            latest timestamp per user handle.
    """

    def __init__(self, users, items, rec_users, rec_items, ratings, times):
        self.user_ids: list = list(users)
        self.item_ids: list = list(items)
        self.user_index = {u: k for k, u in enumerate(self.user_ids)}
        self.item_index = {i: k for k, i in enumerate(self.item_ids)}
        n_users, n_items = len(self.user_ids), len(self.item_ids)

        order = np.lexsort((rec_items, times, rec_users))
        self.u_items = rec_items[order]
        self.u_times = times[order]
        self.u_ratings = ratings[order]
        self._u_rows = rec_users[order]
        self.u_indptr = np.zeros(n_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(rec_users, minlength=n_users), out=self.u_indptr[1:])

        order = np.lexsort((rec_users, times, rec_items))
        self.i_users = rec_users[order]
        self.i_times = times[order]
        self.i_ratings = ratings[order]
        self.pop = np.bincount(rec_items, minlength=n_items).astype(np.int64)
        self.i_indptr = np.zeros(n_items + 1, dtype=np.int64)
        np.cumsum(self.pop, out=self.i_indptr[1:])

        self.last_activity = self.u_times[self.u_indptr[1:] - 1]
        self.max_time = int(times.max())
        self.min_time = int(times.min())

        # popularity order: count descending, then item id ascending
        self.pop_order = np.lexsort((np.arange(n_items), -self.pop))

        for arr in (self.u_items, self.u_times, self.u_ratings, self._u_rows, self.u_indptr,
                    self.i_users, self.i_times, self.i_ratings, self.i_indptr, self.pop,
                    self.last_activity, self.pop_order):
            arr.flags.writeable = False
        self._cache: dict = {}

    # -- sizes ---------------------------------------------------------------
    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def __len__(self):
        return len(self.u_items)

    def __repr__(self):
        return f"<Dataset {self.n_users} users, {self.n_items} items, {len(self)} interactions>"

    @property
    def universe(self) -> frozenset:
        return frozenset(self.item_ids)

    # -- handle helpers --------------------------------------------------------
    def user_handle(self, user) -> int:
        try:
            return self.user_index[user]
        except KeyError:
            raise KeyError(f"unknown user {user!r}") from None

    def item_handle(self, item) -> int:
        try:
            return self.item_index[item]
        except KeyError:
            raise KeyError(f"unknown item {item!r}") from None

    def user_row(self, uh: int) -> slice:
        return slice(self.u_indptr[uh], self.u_indptr[uh + 1])

    def item_row(self, ih: int) -> slice:
        return slice(self.i_indptr[ih], self.i_indptr[ih + 1])

    # -- external-id views ---------------------------------------------------
    def profile(self, user) -> UserProfile:
        uh = self.user_handle(user)
        row = self.user_row(uh)
        return UserProfile(user, tuple(
            Interaction(user, self.item_ids[i], float(r), int(t))
            for i, r, t in zip(self.u_items[row], self.u_ratings[row], self.u_times[row])
        ))

    @property
    def profiles(self) -> dict:
        if "profiles" not in self._cache:
            self._cache["profiles"] = {u: self.profile(u) for u in self.user_ids}
        return self._cache["profiles"]

    def item_raters(self, item) -> list[tuple]:
        """``(user, timestamp, rating)`` triples for an item, oldest first."""
        row = self.item_row(self.item_handle(item))
        return [(self.user_ids[u], int(t), float(r))
                for u, t, r in zip(self.i_users[row], self.i_times[row], self.i_ratings[row])]

    def popularity(self, item) -> int:
        return int(self.pop[self.item_handle(item)])

    def popularity_map(self) -> dict:
        return {i: int(c) for i, c in zip(self.item_ids, self.pop)}

    def interactions(self) -> Iterator[Interaction]:
        """All interactions ordered by user, then timestamp, then item."""
        uids, iids = self.user_ids, self.item_ids
        for u, i, r, t in zip(self._u_rows.tolist(), self.u_items.tolist(),
                              self.u_ratings.tolist(), self.u_times.tolist()):
            yield Interaction(uids[u], iids[i], r, t)

    def subset(self, keep: np.ndarray) -> "Dataset":
        """New dataset from the user-major interactions selected by ``keep``."""
        if not keep.any():
            raise ValueError("empty dataset")
        ru, ri = self._u_rows[keep], self.u_items[keep]
        u_used, ru = np.unique(ru, return_inverse=True)
        i_used, ri = np.unique(ri, return_inverse=True)
        return Dataset([self.user_ids[k] for k in u_used], [self.item_ids[k] for k in i_used],
                       ru.astype(np.int64), ri.astype(np.int64),
                       self.u_ratings[keep].copy(), self.u_times[keep].copy())

    def user_mask(self, users: Iterable) -> np.ndarray:
        mask = np.zeros(self.n_users, dtype=bool)
        mask[[self.user_index[u] for u in users if u in self.user_index]] = True
        return mask


def build_dataset(records: Sequence[Interaction] | Iterable[Interaction]) -> Dataset:
    """Index a collection of interactions.

    Duplicate ``(user, item)`` pairs collapse to the earliest record; on equal
    timestamps the higher rating wins, so the result never depends on input
    order.
    """
    records = list(records)
    if not records:
        raise ValueError("empty dataset")
    users, items, ratings, times = zip(*records)
    for k, (r, t) in enumerate(zip(ratings, times)):
        if not math.isfinite(r):
            raise ValueError(f"non-finite rating in record {k}: {records[k]!r}")
        if t < 0:
            raise ValueError(f"negative timestamp in record {k}: {records[k]!r}")

    user_ids = _sorted_ids(users)
    item_ids = _sorted_ids(items)
    uix = {u: k for k, u in enumerate(user_ids)}
    iix = {i: k for k, i in enumerate(item_ids)}
    ru = np.fromiter((uix[u] for u in users), dtype=np.int64, count=len(records))
    ri = np.fromiter((iix[i] for i in items), dtype=np.int64, count=len(records))
    rr = np.asarray(ratings, dtype=np.float64)
    rt = np.asarray(times, dtype=np.int64)

    # earliest timestamp first, then highest rating; keep the first of each pair
    order = np.lexsort((-rr, rt, ri, ru))
    ru, ri, rr, rt = ru[order], ri[order], rr[order], rt[order]
    keep = np.ones(len(ru), dtype=bool)
    keep[1:] = (ru[1:] != ru[:-1]) | (ri[1:] != ri[:-1])
    return Dataset(user_ids, item_ids, ru[keep], ri[keep], rr[keep], rt[keep])
