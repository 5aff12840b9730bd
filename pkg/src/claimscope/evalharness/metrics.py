"""Text metrics: Levenshtein, claim matching, ROUGE, recall@k, system score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..corpus import tokenize


def levenshtein_distance(a: str, b: str) -> int:
    """Edit distance with unit costs, two-row dynamic program."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance/max(len); two empty strings are identical (similarity 1)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


@dataclass(frozen=True)
class MatchConfig:
    threshold: float = 0.3

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class ClaimMatch:
    generated_index: int
    gold_index: int
    similarity: float


def match_claims(generated: Sequence[str], gold: Sequence[str],
                 config: MatchConfig | None = None) -> list[ClaimMatch]:
    """Pair each generated claim with its most similar gold claim.

    Pairs below the threshold are discarded; similarity ties go to the lower
    gold index. Several generated claims may map to the same gold claim.
    """
    config = config or MatchConfig()
    matches: list[ClaimMatch] = []
    for gi, gen in enumerate(generated):
        best_index = -1
        best_sim = -1.0
        for ki, ref in enumerate(gold):
            sim = levenshtein_similarity(gen, ref)
            if sim > best_sim:
                best_sim = sim
                best_index = ki
        if best_index >= 0 and best_sim >= config.threshold:
            matches.append(ClaimMatch(generated_index=gi, gold_index=best_index,
                                      similarity=best_sim))
    return matches


def _ngrams(tokens: Sequence[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i:i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def _f1(overlap: int, candidate_total: int, reference_total: int) -> float:
    if candidate_total == 0 or reference_total == 0:
        return 0.0
    precision = overlap / candidate_total
    recall = overlap / reference_total
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        curr = [0]
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge(candidate: str, reference: str) -> dict[str, float]:
    """ROUGE-1, ROUGE-2, and ROUGE-L F1 over corpus-tokenizer tokens."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    scores: dict[str, float] = {}
    for n, key in ((1, "rouge1"), (2, "rouge2")):
        cand_grams = _ngrams(cand, n)
        ref_grams = _ngrams(ref, n)
        overlap = sum(min(count, ref_grams.get(gram, 0)) for gram, count in cand_grams.items())
        scores[key] = _f1(overlap, sum(cand_grams.values()), sum(ref_grams.values()))
    scores["rougeL"] = _f1(_lcs_length(cand, ref), len(cand), len(ref))
    return scores


def recall_at_k(relevance: Sequence[Sequence[bool]],
                ks: Iterable[int] = (1, 3, 5)) -> dict[int, float]:
    """Fraction of claims with at least one relevant document in the top k."""
    profiles = list(relevance)
    if not profiles:
        raise ValueError("recall@k needs at least one relevance profile")
    result: dict[int, float] = {}
    for k in ks:
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        hit = sum(1 for profile in profiles if any(profile[:k]))
        result[k] = hit / len(profiles)
    return result


def system_score(correct_claim_fraction: float, label_accuracy_correct: float) -> float:
    """End-to-end score: fraction of correct claims times label accuracy on them."""
    for name, value in (("correct_claim_fraction", correct_claim_fraction),
                        ("label_accuracy_correct", label_accuracy_correct)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    return correct_claim_fraction * label_accuracy_correct
