"""Zero-shot claim verification: label parsing, confidence scoring, evidence alignment."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .corpus import Document
from .evalharness.metrics import levenshtein_similarity
from .gateway import CompletionRequest, CompletionResponse, TokenInfo
from .llmjson import first_json_object
from .prompts import get_template

# Canonical label vocabulary (prompt order). CONTRADICT is internal; the
# presentation layer shows REFUTE. These two tables are the only mapping sites.
LABELS = ("SUPPORT", "CONTRADICT", "NEI")
DISPLAY_LABELS = {"SUPPORT": "SUPPORT", "CONTRADICT": "REFUTE"}
JUDGE_LABEL_WORDS = {"SUPPORT": "SUPPORTED", "CONTRADICT": "REFUTED"}

DEFAULT_ALIGN_THRESHOLD = 0.8
DEFAULT_LOGPROB_FLOOR = -20.0

_RESPONSE_VALUE_RE = re.compile(r'"response"\s*:\s*"')


def display_label(label: str) -> str:
    """Map an internal SUPPORT/CONTRADICT label to its wire form."""
    return DISPLAY_LABELS[label]


def canonical_label(raw: str) -> str | None:
    """Normalize a label from any surface (wire REFUTE included) to canonical form."""
    upper = raw.strip().upper() if isinstance(raw, str) else ""
    if upper == "REFUTE":
        return "CONTRADICT"
    return upper if upper in LABELS else None


@dataclass(frozen=True)
class Verdict:
    claim_id: str
    doc_id: str
    label: str
    confidence: float | None
    evidence_sentences: tuple[str, ...]
    highlight_spans: tuple[tuple[int, int], ...]
    rationale: str
    pub_date: str | None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class LabelScore:
    """Per-label logprobs and their softmax over the three-way vocabulary."""

    logprobs: dict[str, float]
    probabilities: dict[str, float]


def softmax(values: Sequence[float]) -> list[float]:
    """Numerically stable softmax; invariant under adding a constant."""
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return [e / total for e in exps]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences, split at [.!?] runs followed by whitespace.

    Terminators inside tokens (e.g. "3.5") do not split. Spans exclude
    surrounding whitespace and never overlap.
    """
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in ".!?":
            j = i + 1
            while j < n and text[j] in ".!?":
                j += 1
            if j >= n or text[j].isspace():
                spans.append((start, j))
                while j < n and text[j].isspace():
                    j += 1
                start = j
                i = j
                continue
            i = j
        else:
            i += 1
    if start < n:
        spans.append((start, n))
    trimmed = []
    for s, e in spans:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s < e:
            trimmed.append((s, e))
    return trimmed


def align_evidence(evidence_sentences: Sequence[str], abstract: str,
                   threshold: float = DEFAULT_ALIGN_THRESHOLD) -> list[tuple[int, int]]:
    """Map model-quoted sentences onto abstract character spans.

    Each quoted sentence matches its most similar abstract sentence when the
    normalized Levenshtein similarity reaches the threshold; duplicates of the
    same span collapse. Returned spans are in-bounds, disjoint, and sorted.
    """
    spans = split_sentences(abstract)
    if not spans:
        return []
    chosen: set[tuple[int, int]] = set()
    for sentence in evidence_sentences:
        target = " ".join(sentence.split())
        if not target:
            continue
        best_span = None
        best_sim = -1.0
        for s, e in spans:
            candidate = " ".join(abstract[s:e].split())
            sim = levenshtein_similarity(target, candidate)
            if sim > best_sim:
                best_sim = sim
                best_span = (s, e)
        if best_span is not None and best_sim >= threshold:
            chosen.add(best_span)
    return sorted(chosen)


def _token_matches_label(token_text: str, label: str) -> bool:
    # Tokens often carry leading spaces or the opening quote of the JSON value.
    stripped = token_text.strip().strip('"').strip()
    if not stripped:
        return False
    upper = stripped.upper()
    return label.startswith(upper) or upper.startswith(label)


def score_label(tokens: Sequence[TokenInfo] | None, text: str,
                floor: float = DEFAULT_LOGPROB_FLOOR) -> LabelScore | None:
    """Softmax over label logprobs at the first token of the "response" value.

    Labels absent from the token's alternatives get the floor logprob. Returns
    None when logprobs are unavailable or the label position cannot be found.
    """
    if not tokens:
        return None
    match = _RESPONSE_VALUE_RE.search(text)
    if match is None:
        return None
    position = match.end()
    cursor = 0
    label_token = None
    for token in tokens:
        next_cursor = cursor + len(token.token)
        if next_cursor > position:
            label_token = token
            break
        cursor = next_cursor
    if label_token is None:
        return None
    candidates = [(label_token.token, label_token.logprob)]
    candidates.extend((alt.token, alt.logprob) for alt in label_token.alternatives)
    logprobs: dict[str, float] = {}
    for label in LABELS:
        matching = [lp for tok, lp in candidates if _token_matches_label(tok, label)]
        logprobs[label] = max(matching) if matching else floor
    probs = softmax([logprobs[label] for label in LABELS])
    return LabelScore(logprobs=logprobs,
                      probabilities=dict(zip(LABELS, probs)))


def parse_verdict_payload(text: str) -> tuple[str, list[str], str, list[str]]:
    """Tolerantly read (label, evidence, rationale, flags) from model output.

    Malformed output degrades to NEI with a flag; unknown labels map to NEI
    with a flag. Never raises.
    """
    parsed = first_json_object(text)
    if parsed is None:
        return "NEI", [], "", ["parse-failure"]
    flags: list[str] = []
    raw_label = parsed.get("response")
    label = raw_label.strip().upper() if isinstance(raw_label, str) else ""
    if label not in LABELS:
        flags.append("unknown-label")
        label = "NEI"
    raw_evidence = parsed.get("evidence")
    evidence = [s for s in raw_evidence if isinstance(s, str) and s.strip()] \
        if isinstance(raw_evidence, list) else []
    rationale = parsed.get("rationale")
    rationale = rationale if isinstance(rationale, str) else ""
    if label == "NEI":
        evidence = []
    return label, evidence, rationale, flags


class ClaimVerifier:
    """Runs the verification prompt for one claim/document pair."""

    def __init__(self, gateway, align_threshold: float = DEFAULT_ALIGN_THRESHOLD,
                 logprob_floor: float = DEFAULT_LOGPROB_FLOOR,
                 max_tokens: int = 1024, top_logprobs: int = 10) -> None:
        self.gateway = gateway
        self.align_threshold = align_threshold
        self.logprob_floor = logprob_floor
        self.max_tokens = max_tokens
        self.top_logprobs = top_logprobs
        self._template = get_template("verify")

    def verify(self, claim_id: str, claim_text: str, document: Document) -> Verdict:
        """Verify one claim against one document's abstract.

        Gateway transport errors propagate to the caller; malformed model
        output never raises and degrades to a flagged NEI verdict.
        """
        messages = self._template.messages(
            {"claim": claim_text, "evidence": document.abstract}
        )
        request = CompletionRequest(messages=tuple(messages), logprobs=True,
                                    max_tokens=self.max_tokens,
                                    top_logprobs=self.top_logprobs)
        response = self.gateway.complete(request)
        return self.build_verdict(claim_id, document, response)

    def build_verdict(self, claim_id: str, document: Document,
                      response: CompletionResponse) -> Verdict:
        label, evidence, rationale, flags = parse_verdict_payload(response.text)
        score = score_label(response.tokens, response.text, floor=self.logprob_floor)
        confidence = score.probabilities[label] if score else None
        if label == "NEI":
            highlights: list[tuple[int, int]] = []
        else:
            highlights = align_evidence(evidence, document.abstract,
                                        threshold=self.align_threshold)
        return Verdict(
            claim_id=claim_id,
            doc_id=document.doc_id,
            label=label,
            confidence=confidence,
            evidence_sentences=tuple(evidence),
            highlight_spans=tuple(highlights),
            rationale=rationale,
            pub_date=document.pub_date,
            flags=tuple(flags),
        )

    def failure_verdict(self, claim_id: str, document: Document, reason: str) -> Verdict:
        """NEI verdict for a pair whose gateway call failed; keeps analyze alive."""
        return Verdict(
            claim_id=claim_id,
            doc_id=document.doc_id,
            label="NEI",
            confidence=None,
            evidence_sentences=(),
            highlight_spans=(),
            rationale="",
            pub_date=document.pub_date,
            flags=(reason,),
        )
