"""Top-N recommenders: TimePop, MostPopular and user/item kNN with optional decay.

Every recommender returns a :class:`RankedList` ordered by score descending,
then global popularity descending, then item id ascending.  Items in the
target's training profile are never returned; when fewer than N items receive
a score the remaining slots are filled from global popularity and flagged as
``backfill``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp

from timepop.decay import SECONDS_PER_DAY, DecayParams, decay_weights, delta_t_days_array
from timepop.model import Dataset, RecommendationContext
from timepop.precursors import precursor_handles

SCORED = "scored"
BACKFILL = "backfill"


class ScoredItem(NamedTuple):
    item: object
    score: float
    source: str


@dataclass(frozen=True)
class RankedList:
    user: object
    entries: tuple[ScoredItem, ...]

    @property
    def items(self) -> list:
        return [e.item for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k):
        return self.entries[k]


Recommender = Callable[[Dataset, object, RecommendationContext], RankedList]


def _rank(dataset: Dataset, user, uh: int, scored: np.ndarray, scores: np.ndarray,
          n: int) -> RankedList:
    """Order scored item handles and backfill by popularity up to ``n`` entries."""
    rated = dataset.u_items[dataset.user_row(uh)]
    keep = ~np.isin(scored, rated)
    scored, scores = scored[keep], scores[keep]
    order = np.lexsort((scored, -dataset.pop[scored], -scores))[:n]
    ids = dataset.item_ids
    entries = [ScoredItem(ids[i], float(s), SCORED)
               for i, s in zip(scored[order].tolist(), scores[order].tolist())]
    if len(entries) < n:
        excluded = np.zeros(dataset.n_items, dtype=bool)
        excluded[rated] = True
        excluded[scored[order]] = True
        po = dataset.pop_order
        fill = po[~excluded[po]][: n - len(entries)]
        entries.extend(ScoredItem(ids[i], 0.0, BACKFILL) for i in fill.tolist())
    return RankedList(user, tuple(entries))


def _gather_rows(indptr: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flat positions of all CSR entries in ``rows`` plus each entry's row ordinal."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    owner = np.repeat(np.arange(len(rows)), lens)
    offsets = np.arange(lens.sum()) - np.repeat(np.cumsum(lens) - lens, lens)
    return starts[owner] + offsets, owner


def _check_t0(dataset: Dataset, ctx: RecommendationContext):
    if ctx.t0 < dataset.max_time:
        raise ValueError(
            f"non-causal timestamps: t0={ctx.t0} precedes training data (max {dataset.max_time})")


def timepop_scores(dataset: Dataset, uh: int, ctx: RecommendationContext):
    """Item handles and decayed local-popularity scores for user handle ``uh``.

    Returns ``None`` when the user has no precursors.
    """
    _, _, _, prec = precursor_handles(dataset, uh, ctx.tau_mode)
    if len(prec) == 0:
        return None
    pos, owner = _gather_rows(dataset.u_indptr, prec)
    items = dataset.u_items[pos]
    last = dataset.last_activity[prec][owner]
    w = decay_weights(delta_t_days_array(ctx.t0, last, dataset.u_times[pos]), ctx.decay)
    totals = np.bincount(items, weights=w, minlength=dataset.n_items)
    present = np.zeros(dataset.n_items, dtype=bool)
    present[items] = True
    scored = np.flatnonzero(present)
    return scored, totals[scored]


def timepop_recommend(dataset: Dataset, target, ctx: RecommendationContext) -> RankedList:
    """Rank items by decayed popularity among the target's precursors."""
    uh = dataset.user_handle(target)
    _check_t0(dataset, ctx)
    res = timepop_scores(dataset, uh, ctx)
    if res is None:
        res = np.empty(0, dtype=np.int64), np.empty(0)
    return _rank(dataset, target, uh, res[0], res[1], ctx.top_n)


def most_popular(dataset: Dataset, target, n: int) -> RankedList:
    """Globally most-rated items the target has not rated, scored by rater count."""
    uh = dataset.user_handle(target)
    items = np.arange(dataset.n_items)
    return _rank(dataset, target, uh, items, dataset.pop.astype(np.float64), n)


def mostpop_recommend(dataset: Dataset, target, ctx: RecommendationContext) -> RankedList:
    return most_popular(dataset, target, ctx.top_n)


# -- kNN baselines -------------------------------------------------------------

def _binary_matrix(dataset: Dataset) -> sp.csr_matrix:
    if "X" not in dataset._cache:
        data = np.ones(len(dataset), dtype=np.float64)
        dataset._cache["X"] = sp.csr_matrix(
            (data, dataset.u_items, dataset.u_indptr), shape=(dataset.n_users, dataset.n_items))
    return dataset._cache["X"]


def _top_k(sims: np.ndarray, handles: np.ndarray, k: int) -> np.ndarray:
    """Positions of the ``k`` largest positive similarities; ties by handle ascending."""
    pos = np.flatnonzero(sims > 0)
    order = np.lexsort((handles[pos], -sims[pos]))[:k]
    return pos[order]


def user_similarities(dataset: Dataset, uh: int) -> np.ndarray:
    """Binary cosine similarity of user ``uh`` to every user (self set to 0)."""
    X = _binary_matrix(dataset)
    common = np.asarray((X @ X[uh].T).todense()).ravel()
    sizes = np.diff(dataset.u_indptr).astype(np.float64)
    sims = common / np.sqrt(sizes * sizes[uh])
    sims[uh] = 0.0
    return sims


def item_neighbors(dataset: Dataset, k: int) -> sp.csr_matrix:
    """Sparse ``items x items`` matrix holding, in row ``i``, the top-``k`` cosine neighbors of ``i``."""
    key = ("item_nbrs", k)
    if key in dataset._cache:
        return dataset._cache[key]
    X = _binary_matrix(dataset).tocsc()
    co = (X.T @ X).tocsr()
    co.setdiag(0)
    co.eliminate_zeros()
    co.sort_indices()
    norms = np.sqrt(dataset.pop.astype(np.float64))
    rows, cols, vals = [], [], []
    for i in range(dataset.n_items):
        lo, hi = co.indptr[i], co.indptr[i + 1]
        if lo == hi:
            continue
        js = co.indices[lo:hi]
        sims = co.data[lo:hi] / (norms[i] * norms[js])
        top = _top_k(sims, js, k)
        rows.append(np.full(len(top), i))
        cols.append(js[top])
        vals.append(sims[top])
    if rows:
        nbrs = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(dataset.n_items, dataset.n_items))
    else:
        nbrs = sp.csr_matrix((dataset.n_items, dataset.n_items))
    dataset._cache[key] = nbrs
    return nbrs


def _single_anchor_weights(t0: int, times: np.ndarray, params: DecayParams) -> np.ndarray:
    return decay_weights((t0 - times) / SECONDS_PER_DAY, params)


def knn_recommend(dataset: Dataset, target, ctx: RecommendationContext, variant: str = "user",
                  k: int = 50, decay_enabled: bool = False) -> RankedList:
    """User- or item-based kNN on binary implicit feedback.

    With ``decay_enabled`` every contribution is weighted by the decay of
    ``t0 - t_rating`` (the neighbor's rating time for the user variant, the
    target's own rating time for the item variant).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    uh = dataset.user_handle(target)
    _check_t0(dataset, ctx)
    if variant == "user":
        sims = user_similarities(dataset, uh)
        nbrs = _top_k(sims, np.arange(dataset.n_users), k)
        pos, owner = _gather_rows(dataset.u_indptr, nbrs)
        contrib = sims[nbrs][owner]
        if decay_enabled:
            contrib = contrib * _single_anchor_weights(ctx.t0, dataset.u_times[pos], ctx.decay)
        items = dataset.u_items[pos]
    elif variant == "item":
        nbrs = item_neighbors(dataset, k)
        row = dataset.user_row(uh)
        in_profile = np.zeros(dataset.n_items)
        in_profile[dataset.u_items[row]] = 1.0
        w = np.zeros(dataset.n_items)
        w[dataset.u_items[row]] = (
            _single_anchor_weights(ctx.t0, dataset.u_times[row], ctx.decay)
            if decay_enabled else 1.0)
        # score(i) = sum_j sim(i, j) * w_j over profile items j in i's neighbor list
        totals = nbrs @ w
        items = np.flatnonzero((nbrs @ in_profile) > 0)
        return _rank(dataset, target, uh, items, totals[items], ctx.top_n)
    else:
        raise ValueError(f"unknown kNN variant {variant!r}")
    totals = np.bincount(items, weights=contrib, minlength=dataset.n_items)
    present = np.zeros(dataset.n_items, dtype=bool)
    present[items] = True
    scored = np.flatnonzero(present)
    return _rank(dataset, target, uh, scored, totals[scored], ctx.top_n)


ALGORITHMS = ("timepop", "mostpop", "user-knn", "item-knn")


def make_recommender(algo: str, k: int = 50, decay_enabled: bool = False) -> Recommender:
    """Uniform ``(dataset, user, ctx) -> RankedList`` producer for an algorithm name."""
    if algo == "timepop":
        return timepop_recommend
    if algo == "mostpop":
        return mostpop_recommend
    if algo in ("user-knn", "item-knn"):
        return _KNN(algo.split("-")[0], k, decay_enabled)
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass(frozen=True)
class _KNN:
    variant: str
    k: int
    decay_enabled: bool

    def __call__(self, dataset, target, ctx):
        return knn_recommend(dataset, target, ctx, self.variant, self.k, self.decay_enabled)
