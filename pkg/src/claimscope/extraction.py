"""Claim extraction: candidate parsing from LLM output plus per-claim refinement."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gateway import ChatMessage, CompletionRequest
from .llmjson import first_json_object
from .prompts import get_template, split_messages

DEFAULT_CANDIDATE_CAP = 20

# Extraction prompt modes: "cdp_cr" is the production default (claim-density
# extraction plus per-claim refinement); "base" uses the plain extraction
# prompt with a single follow-up call that reformulates the whole list.
MODES = ("cdp_cr", "base")


@dataclass(frozen=True)
class Candidate:
    text: str
    span: tuple[int, int]  # character span of the claim text in the raw model output


@dataclass(frozen=True)
class Claim:
    claim_id: str
    text: str
    original_text: str
    refinement_rationale: str
    source_span: tuple[int, int] | None
    flags: tuple[str, ...] = ()


def parse_candidates(raw: str) -> list[Candidate]:
    """Collect "-- " lines from extraction output, deduplicated keep-first.

    Duplicate detection is case-insensitive with collapsed whitespace.
    """
    candidates: list[Candidate] = []
    seen: set[str] = set()
    offset = 0
    for line in raw.splitlines(keepends=True):
        stripped = line.strip()
        content = line.rstrip("\r\n")
        if stripped.startswith("-- "):
            lead = len(line) - len(line.lstrip())
            body = content.strip()[3:].strip()
            if body:
                key = " ".join(body.casefold().split())
                if key not in seen:
                    seen.add(key)
                    start = offset + line.index(body[0], lead + 3)
                    candidates.append(Candidate(text=body, span=(start, start + len(body))))
        offset += len(line)
    return candidates


def parse_refinement(raw: str) -> tuple[str, str] | None:
    """Read (refined_claim, rationale) from a refinement response, or None."""
    parsed = first_json_object(raw)
    if parsed is None:
        return None
    refined = parsed.get("refined_claim")
    if not isinstance(refined, str) or not refined.strip():
        return None
    rationale = parsed.get("rationale")
    return refined.strip(), rationale if isinstance(rationale, str) else ""


class ClaimExtractor:
    """Extracts check-worthy claims from free text via the configured prompts."""

    def __init__(self, gateway, mode: str = "cdp_cr",
                 candidate_cap: int = DEFAULT_CANDIDATE_CAP,
                 max_tokens: int = 1024) -> None:
        if mode not in MODES:
            raise ValueError(f"unknown extraction mode: {mode!r}")
        if candidate_cap < 1:
            raise ValueError("candidate_cap must be at least 1")
        self.gateway = gateway
        self.mode = mode
        self.candidate_cap = candidate_cap
        self.max_tokens = max_tokens

    def _complete(self, messages: Sequence[ChatMessage]) -> str:
        request = CompletionRequest(messages=tuple(messages), max_tokens=self.max_tokens)
        return self.gateway.complete(request).text

    def extract_candidates(self, text: str) -> tuple[list[Candidate], list[str], list[ChatMessage]]:
        """One extraction call; returns candidates, flags, and the transcript."""
        template = get_template("extract_cdp" if self.mode == "cdp_cr" else "extract_base")
        messages = template.messages({"text": text})
        raw = self._complete(messages)
        candidates = parse_candidates(raw)
        flags: list[str] = []
        if not candidates:
            flags.append("no-candidates")
        if len(candidates) > self.candidate_cap:
            candidates = candidates[:self.candidate_cap]
            flags.append("candidate-cap")
        transcript = list(messages) + [ChatMessage(role="assistant", content=raw)]
        return candidates, flags, transcript

    def refine(self, candidates: Sequence[Candidate], text: str,
               transcript: Sequence[ChatMessage]) -> list[Claim]:
        if self.mode == "cdp_cr":
            return self._refine_per_claim(candidates, text)
        return self._refine_followup(candidates, transcript)

    def _refine_per_claim(self, candidates: Sequence[Candidate], text: str) -> list[Claim]:
        # One refinement call per candidate; a failed parse keeps the original.
        template = get_template("refine_cdp_cr")
        claims: list[Claim] = []
        for i, candidate in enumerate(candidates, start=1):
            messages = template.messages({"claim": candidate.text, "text": text})
            raw = self._complete(messages)
            parsed = parse_refinement(raw)
            if parsed is None:
                claims.append(Claim(claim_id=f"c{i}", text=candidate.text,
                                    original_text=candidate.text,
                                    refinement_rationale="",
                                    source_span=candidate.span,
                                    flags=("unrefined",)))
            else:
                refined, rationale = parsed
                claims.append(Claim(claim_id=f"c{i}", text=refined,
                                    original_text=candidate.text,
                                    refinement_rationale=rationale,
                                    source_span=candidate.span))
        return claims

    def _refine_followup(self, candidates: Sequence[Candidate],
                         transcript: Sequence[ChatMessage]) -> list[Claim]:
        # Single follow-up turn reformulating the whole list. The reply is
        # matched to candidates by position; a count mismatch keeps originals.
        followup = get_template("refine_followup")
        messages = list(transcript) + split_messages(followup.body)
        raw = self._complete(messages)
        refined = parse_candidates(raw)
        if len(refined) != len(candidates):
            return [Claim(claim_id=f"c{i}", text=c.text, original_text=c.text,
                          refinement_rationale="", source_span=c.span,
                          flags=("refine-mismatch",))
                    for i, c in enumerate(candidates, start=1)]
        return [Claim(claim_id=f"c{i}", text=r.text, original_text=c.text,
                      refinement_rationale="", source_span=c.span)
                for i, (c, r) in enumerate(zip(candidates, refined), start=1)]

    def extract(self, text: str) -> tuple[list[Claim], list[str]]:
        """Full extraction: candidates then refinement; returns (claims, flags)."""
        candidates, flags, transcript = self.extract_candidates(text)
        if not candidates:
            return [], flags
        return self.refine(candidates, text, transcript), flags
