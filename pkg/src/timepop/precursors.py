"""Candidate Precursors, the automatic threshold, and Precursor sets.

A user ``v`` is a candidate precursor of ``u`` when ``v`` rated at least one
item strictly before ``u`` rated the same item.  Candidates whose count of
such "common-before" items reaches the threshold are precursors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from timepop.model import Dataset, TauMode


class CandidateEntry(NamedTuple):
    candidate: object
    common_before: int


@dataclass(frozen=True)
class PrecursorSet:
    target: object
    candidates: tuple[CandidateEntry, ...]
    tau: float
    precursors: frozenset

    def rows(self):
        """``(candidate, common_before, is_precursor)`` for every candidate."""
        return [(c.candidate, c.common_before, c.candidate in self.precursors)
                for c in self.candidates]


def common_before_counts(dataset: Dataset, uh: int) -> np.ndarray:
    """Common-before count for every user handle against target handle ``uh``.

    Walks the target's profile; for each item, the raters strictly earlier
    than the target form a prefix of the time-sorted rater list.
    """
    row = dataset.user_row(uh)
    items = dataset.u_items[row]
    times = dataset.u_times[row]
    indptr, i_times, i_users = dataset.i_indptr, dataset.i_times, dataset.i_users
    chunks = []
    for i, t in zip(items.tolist(), times.tolist()):
        lo = indptr[i]
        hi = lo + np.searchsorted(i_times[lo:indptr[i + 1]], t, side="left")
        if hi > lo:
            chunks.append(i_users[lo:hi])
    if not chunks:
        return np.zeros(dataset.n_users, dtype=np.int64)
    return np.bincount(np.concatenate(chunks), minlength=dataset.n_users)


def _resolve_tau(counts: np.ndarray, mode: TauMode) -> float:
    if mode == "auto":
        if len(counts) == 0:
            raise ValueError("no candidates")
        return float(counts.sum()) / len(counts)
    return float(mode)


def compute_tau(candidates: Sequence[CandidateEntry], mode: TauMode = "auto") -> float:
    """Mean common-before count over the candidates, or the fixed value."""
    return _resolve_tau(np.array([c.common_before for c in candidates], dtype=np.int64), mode)


def precursor_handles(dataset: Dataset, uh: int, mode: TauMode = "auto"):
    """Handle-level precursor computation: ``(candidate handles, counts, tau, precursor handles)``."""
    counts = common_before_counts(dataset, uh)
    cand = np.flatnonzero(counts)
    cc = counts[cand]
    if len(cand) == 0:
        return cand, cc, 0.0, cand
    tau = _resolve_tau(cc, mode)
    if mode == "auto":
        # integer form of cc >= sum/len, exact
        sel = cc * len(cc) >= cc.sum()
    else:
        sel = cc >= tau
    return cand, cc, tau, cand[sel]


def candidate_precursors(dataset: Dataset, target) -> list[CandidateEntry]:
    uh = dataset.user_handle(target)
    counts = common_before_counts(dataset, uh)
    cand = np.flatnonzero(counts)
    return [CandidateEntry(dataset.user_ids[c], int(counts[c])) for c in cand]


def precursor_set(dataset: Dataset, target, mode: TauMode = "auto") -> PrecursorSet:
    """Precursors of ``target``; an empty candidate list yields ``tau == 0``."""
    uh = dataset.user_handle(target)
    cand, cc, tau, prec = precursor_handles(dataset, uh, mode)
    ids = dataset.user_ids
    return PrecursorSet(
        target=target,
        candidates=tuple(CandidateEntry(ids[c], int(n)) for c, n in zip(cand, cc)),
        tau=tau,
        precursors=frozenset(ids[p] for p in prec),
    )
