"""Seeded synthetic interaction generators."""

from __future__ import annotations

import numpy as np

from timepop.decay import SECONDS_PER_DAY
from timepop.model import Interaction

EPOCH = 1_000_000_000


def planted_signal(seed: int = 0, n_groups: int = 50, group_size: int = 10, n_leaders: int = 2,
                   group_items: int = 40, n_global: int = 300, noise_per_user: int = 15,
                   horizon_days: int = 365, take: float = 0.8) -> list[Interaction]:
    """Communities where followers trail their leaders through a private catalog.

    Leaders rate their group's items in a fixed order spread over the
    horizon; each follower rates most of the same items after a personal lag,
    so items a follower meets after any cut-off are the ones its leaders
    rated recently before it.  Group ratings are 4-5.  Every user also rates
    Zipf-popular global items (ratings 1-3) at random times, so global
    popularity carries no relevance signal.

    Users are ``n_groups * group_size`` (500 by default); user ids are
    ``"u<k>"`` and item ids ``"g<k>"`` / ``"p<k>"``.
    """
    rng = np.random.default_rng(seed)
    day = SECONDS_PER_DAY
    gap = (horizon_days - 60) / group_items
    zipf = 1.0 / np.arange(1, n_global + 1) ** 0.8
    zipf /= zipf.sum()
    out = []
    uid = 0
    for g in range(n_groups):
        base = EPOCH + int(rng.integers(0, 10 * day))
        lead_times = base + (np.arange(group_items) * gap * day).astype(np.int64)
        for m in range(group_size):
            user = f"u{uid}"
            uid += 1
            if m < n_leaders:
                times = lead_times + rng.integers(0, 2 * day, group_items)
                taken = np.ones(group_items, dtype=bool)
            else:
                lag = rng.uniform(10, 40) * day
                times = lead_times + int(lag) + rng.integers(0, 3 * day, group_items)
                taken = rng.random(group_items) < take
            for k in np.flatnonzero(taken):
                out.append(Interaction(user, f"g{g * group_items + k}",
                                       float(rng.integers(4, 6)), int(times[k])))
            noise = rng.choice(n_global, size=noise_per_user, replace=False, p=zipf)
            ntimes = EPOCH + rng.integers(0, horizon_days * day, noise_per_user)
            for i, t in zip(noise, ntimes):
                out.append(Interaction(user, f"p{i}", float(rng.integers(1, 4)), int(t)))
    return out


def movielens_like(seed: int = 0, n_users: int = 6040, n_items: int = 3706,
                   n_interactions: int = 1_000_000, years: float = 3.0):
    """Columnar MovieLens-1M-shaped data: ``(users, items, ratings, times)`` arrays.

    Heavy-tailed user activity (at least 20 ratings each), Zipf item
    popularity, and per-user activity windows inside the time span.
    """
    rng = np.random.default_rng(seed)
    act = rng.lognormal(0.0, 1.0, n_users)
    cap = n_items // 2
    sizes = 20 + np.floor(act / act.sum() * (n_interactions - 20 * n_users)).astype(np.int64)
    sizes = np.minimum(sizes, cap)
    while sizes.sum() < n_interactions:
        room = np.flatnonzero(sizes < cap)
        need = n_interactions - sizes.sum()
        sizes[room[:need]] += 1
    pop = 1.0 / np.arange(1, n_items + 1) ** 0.9
    pop = pop[rng.permutation(n_items)]
    pop /= pop.sum()
    span = int(years * 365 * SECONDS_PER_DAY)
    users, items, times = [], [], []
    for u, s in enumerate(sizes):
        its = rng.choice(n_items, size=s, replace=False, p=pop)
        start = rng.integers(0, span)
        width = max(SECONDS_PER_DAY, int(rng.exponential(0.3) * span))
        ts = EPOCH + np.minimum(start + rng.integers(0, width, s), span)
        users.append(np.full(s, u + 1))
        items.append(its + 1)
        times.append(ts)
    users = np.concatenate(users)
    items = np.concatenate(items)
    times = np.concatenate(times)
    ratings = rng.integers(1, 6, len(users)).astype(np.float64)
    return users, items, ratings, times


def write_movielens_dat(path, columns) -> None:
    users, items, ratings, times = columns
    with open(path, "w", encoding="utf-8") as f:
        f.writelines(f"{u}::{i}::{int(r)}::{t}\n"
                     for u, i, r, t in zip(users.tolist(), items.tolist(), ratings.tolist(), times.tolist()))
