"""Evaluation harness: text metrics, judge-model phases, and run reports."""

from .metrics import (
    ClaimMatch,
    MatchConfig,
    levenshtein_distance,
    levenshtein_similarity,
    match_claims,
    recall_at_k,
    rouge,
    system_score,
)

__all__ = [
    "ClaimMatch",
    "MatchConfig",
    "levenshtein_distance",
    "levenshtein_similarity",
    "match_claims",
    "recall_at_k",
    "rouge",
    "system_score",
]
