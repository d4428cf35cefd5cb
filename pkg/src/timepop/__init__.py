"""Time-aware local popularity (TimePop) top-N recommendation and its offline evaluation protocol."""

from timepop.decay import DecayParams, decay_weight, delta_t_days
from timepop.evaluation import EvalConfig, EvalReport, evaluate, ndcg_at, paired_ttest, relevant_items
from timepop.ingestion import ParseConfig, parse_interactions, read_split, write_split
from timepop.model import Dataset, Interaction, RecommendationContext, UserProfile, build_dataset
from timepop.precursors import CandidateEntry, PrecursorSet, candidate_precursors, compute_tau, precursor_set
from timepop.recommend import (
    RankedList, ScoredItem, knn_recommend, make_recommender, most_popular, timepop_recommend,
)
from timepop.splitter import (
    SplitResult, SplitSpec, apply_split, count_eligible_users, find_best_split,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateEntry", "Dataset", "DecayParams", "EvalConfig", "EvalReport", "Interaction",
    "ParseConfig", "PrecursorSet", "RankedList", "RecommendationContext", "ScoredItem",
    "SplitResult", "SplitSpec", "UserProfile", "apply_split", "build_dataset",
    "candidate_precursors", "compute_tau", "count_eligible_users", "decay_weight",
    "delta_t_days", "evaluate", "find_best_split", "knn_recommend", "make_recommender",
    "most_popular", "ndcg_at", "paired_ttest", "parse_interactions", "precursor_set",
    "read_split", "relevant_items", "timepop_recommend", "write_split",
]
