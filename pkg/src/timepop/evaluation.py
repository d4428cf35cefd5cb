"""Offline top-N evaluation: threshold relevance, nDCG@N curves, paired t-tests."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from timepop.model import Dataset, Interaction, RecommendationContext, UserProfile, id_key
from timepop.parallel import recommend_all
from timepop.recommend import RankedList, Recommender


@dataclass(frozen=True)
class EvalConfig:
    top_n_max: int = 10
    relevance_threshold: float = 4.0
    skip_users_without_relevant: bool = True

    def __post_init__(self):
        if self.top_n_max < 2:
            raise ValueError("top_n_max must be >= 2")

    @property
    def cutoffs(self) -> range:
        return range(2, self.top_n_max + 1)


@dataclass(frozen=True)
class EvalReport:
    per_n: dict[int, float]
    per_user: dict[object, tuple[float, ...]]
    evaluated_count: int
    lists: dict[object, RankedList]

    def mean_at(self, n: int) -> float:
        return self.per_n[n]

    def user_scores(self, n: int) -> dict:
        k = sorted(self.per_n).index(n)
        return {u: v[k] for u, v in self.per_user.items()}


def relevant_items(test_profile: UserProfile | Iterable[Interaction], config: EvalConfig = EvalConfig()) -> set:
    return {x.item for x in test_profile if x.rating >= config.relevance_threshold}


_DISCOUNT = 1.0 / np.log2(np.arange(2, 1026))


def _discounts(n: int) -> np.ndarray:
    if n <= len(_DISCOUNT):
        return _DISCOUNT[:n]
    return 1.0 / np.log2(np.arange(2, n + 2))


def ndcg_at(ranked: RankedList | Sequence, relevant: set, n: int) -> float:
    """Binary-gain nDCG over the first ``n`` positions of ``ranked``.

    ``ranked`` may be a :class:`RankedList` or a plain sequence of item ids.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not relevant:
        raise ValueError("no relevant items")
    items = ranked.items if isinstance(ranked, RankedList) else list(ranked)
    items = items[:n]
    hits = np.fromiter((it in relevant for it in items), dtype=bool, count=len(items))
    # same summation as the ideal list, so a perfect ranking gives exactly 1.0
    dcg = float(_discounts(len(items))[hits].sum())
    idcg = float(_discounts(min(n, len(relevant))).sum())
    return dcg / idcg


def group_by_user(records: Iterable[Interaction]) -> dict[object, UserProfile]:
    by_user = defaultdict(list)
    for x in records:
        by_user[x.user].append(x)
    return {u: UserProfile(u, tuple(sorted(xs, key=lambda x: (x.timestamp, id_key(x.item)))))
            for u, xs in sorted(by_user.items(), key=lambda kv: id_key(kv[0]))}


def evaluate(dataset_train: Dataset, test: Iterable[Interaction], recommender: Recommender,
             config: EvalConfig = EvalConfig(), ctx: RecommendationContext | None = None,
             workers: int | None = None) -> EvalReport:
    """Mean nDCG@N for N in ``2..top_n_max`` over test users.

    Each user receives one list of length ``top_n_max`` built from the
    training data only; shorter cutoffs read its prefix.  Test users absent
    from training are skipped.
    """
    if ctx is None:
        ctx = RecommendationContext(t0=dataset_train.max_time)
    ctx = replace(ctx, top_n=config.top_n_max)
    profiles = group_by_user(test)
    users = [u for u in profiles if u in dataset_train.user_index]
    relevant = {u: relevant_items(profiles[u], config) for u in users}
    if config.skip_users_without_relevant:
        relevant = {u: r for u, r in relevant.items() if r}
    if not relevant:
        raise ValueError("no users to evaluate")
    # lists for every test user, so relevance labels cannot change what is recommended
    lists = recommend_all(dataset_train, users, recommender, ctx, workers)
    cutoffs = list(config.cutoffs)
    per_user = {}
    for u, rel in relevant.items():
        if rel:
            per_user[u] = tuple(ndcg_at(lists[u], rel, n) for n in cutoffs)
        else:
            per_user[u] = tuple(0.0 for _ in cutoffs)
    mat = np.array(list(per_user.values()))
    per_n = {n: float(mat[:, k].mean()) for k, n in enumerate(cutoffs)}
    return EvalReport(per_n, per_user, len(per_user), lists)


def paired_ttest(per_user_a: Mapping, per_user_b: Mapping) -> tuple[float, float]:
    """Two-sided paired Student's t-test over users present in both mappings."""
    common = [u for u in per_user_a if u in per_user_b]
    if len(common) < 2:
        raise ValueError("need at least 2 common users")
    d = np.array([per_user_a[u] - per_user_b[u] for u in common], dtype=np.float64)
    m = len(d)
    sd = d.std(ddof=1)
    if sd == 0 or not math.isfinite(sd):
        raise ValueError("degenerate sample")
    t = d.mean() / (sd / math.sqrt(m))
    p = 2 * stats.t.sf(abs(t), df=m - 1)
    return float(t), float(p)
