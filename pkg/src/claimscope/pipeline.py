"""End-to-end analysis: extract claims, retrieve evidence, verify each pair."""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from .corpus import CorpusIndex, Document, EvidenceHit
from .extraction import Claim, ClaimExtractor
from .gateway import GatewayError
from .verification import ClaimVerifier, Verdict, display_label

MAX_TEXT_CHARS = 10_000
RECOMMENDED_TEXT_CHARS = 2_000
MAX_RETRIEVAL_K = 20
DEFAULT_RETRIEVAL_K = 5


@dataclass(frozen=True)
class ClaimAnalysis:
    claim: Claim
    retrieval: tuple[EvidenceHit, ...]
    verdicts: tuple[Verdict, ...]  # ordered by retrieval rank


@dataclass(frozen=True)
class AnalysisReport:
    input_digest: str
    retrieval_k: int
    claims: tuple[ClaimAnalysis, ...]
    suppressed_nei_count: int
    documents: dict[str, Document]
    timings_ms: dict[str, float]
    flags: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        """Stable JSON-ready shape; only timings_ms varies across identical runs."""
        return {
            "input_digest": self.input_digest,
            "retrieval_k": self.retrieval_k,
            "claims": [
                {
                    "claim_id": ca.claim.claim_id,
                    "text": ca.claim.text,
                    "original_text": ca.claim.original_text,
                    "refinement_rationale": ca.claim.refinement_rationale,
                    "source_span": list(ca.claim.source_span) if ca.claim.source_span else None,
                    "flags": list(ca.claim.flags),
                    "retrieval": [
                        {"doc_id": h.doc_id, "score": h.score, "rank": h.rank}
                        for h in ca.retrieval
                    ],
                    "verdicts": [
                        {
                            "claim_id": v.claim_id,
                            "doc_id": v.doc_id,
                            "label": v.label,
                            "confidence": v.confidence,
                            "evidence_sentences": list(v.evidence_sentences),
                            "highlight_spans": [list(s) for s in v.highlight_spans],
                            "rationale": v.rationale,
                            "pub_date": v.pub_date,
                            "flags": list(v.flags),
                        }
                        for v in ca.verdicts
                    ],
                }
                for ca in self.claims
            ],
            "suppressed_nei_count": self.suppressed_nei_count,
            "documents": {
                doc_id: {
                    "doc_id": doc.doc_id,
                    "title": doc.title,
                    "abstract": doc.abstract,
                    "doi": doc.doi,
                    "pub_date": doc.pub_date,
                }
                for doc_id, doc in sorted(self.documents.items())
            },
            "timings_ms": dict(self.timings_ms),
            "flags": list(self.flags),
        }


class AnalysisPipeline:
    """Wires extractor, index, and verifier into a single analyze() call."""

    def __init__(self, index: CorpusIndex, extractor: ClaimExtractor,
                 verifier: ClaimVerifier,
                 retrieval_k: int = DEFAULT_RETRIEVAL_K) -> None:
        if not 1 <= retrieval_k <= MAX_RETRIEVAL_K:
            raise ValueError(f"retrieval_k must be in 1..{MAX_RETRIEVAL_K}")
        self.index = index
        self.extractor = extractor
        self.verifier = verifier
        self.retrieval_k = retrieval_k

    def analyze(self, text: str, k: int | None = None) -> AnalysisReport:
        """Analyze free text; per-pair gateway failures become flagged NEI verdicts.

        Raises ValueError on empty or oversize input and out-of-range k.
        """
        if not isinstance(text, str) or len(text) < 1:
            raise ValueError("text must be a non-empty string")
        if len(text) > MAX_TEXT_CHARS:
            raise ValueError(f"text exceeds {MAX_TEXT_CHARS} characters")
        k = self.retrieval_k if k is None else k
        if not 1 <= k <= MAX_RETRIEVAL_K:
            raise ValueError(f"k must be in 1..{MAX_RETRIEVAL_K}")

        t_start = time.perf_counter()
        claims, flags = self.extractor.extract(text)
        t_extract = time.perf_counter()

        retrievals: list[tuple[EvidenceHit, ...]] = [
            tuple(self.index.search(claim.text, k)) for claim in claims
        ]
        t_retrieve = time.perf_counter()

        pairs: list[tuple[Claim, EvidenceHit]] = [
            (claim, hit)
            for claim, hits in zip(claims, retrievals)
            for hit in hits
        ]
        verdicts = self._verify_pairs(pairs)
        t_verify = time.perf_counter()

        analyses: list[ClaimAnalysis] = []
        cursor = 0
        documents: dict[str, Document] = {}
        all_flags = set(flags)
        for claim, hits in zip(claims, retrievals):
            claim_verdicts = tuple(verdicts[cursor:cursor + len(hits)])
            cursor += len(hits)
            analyses.append(ClaimAnalysis(claim=claim, retrieval=hits,
                                          verdicts=claim_verdicts))
            all_flags.update(claim.flags)
            for verdict in claim_verdicts:
                all_flags.update(verdict.flags)
            for hit in hits:
                doc = self.index.get(hit.doc_id)
                if doc is not None:
                    documents[doc.doc_id] = doc

        suppressed = sum(
            1 for ca in analyses for v in ca.verdicts if v.label == "NEI"
        )
        timings = {
            "extract_ms": (t_extract - t_start) * 1000.0,
            "retrieve_ms": (t_retrieve - t_extract) * 1000.0,
            "verify_ms": (t_verify - t_retrieve) * 1000.0,
            "total_ms": (time.perf_counter() - t_start) * 1000.0,
        }
        return AnalysisReport(
            input_digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
            retrieval_k=k,
            claims=tuple(analyses),
            suppressed_nei_count=suppressed,
            documents=documents,
            timings_ms=timings,
            flags=tuple(sorted(all_flags)),
        )

    def _verify_pairs(self, pairs: list[tuple[Claim, EvidenceHit]]) -> list[Verdict]:
        if not pairs:
            return []

        def run(pair: tuple[Claim, EvidenceHit]) -> Verdict:
            claim, hit = pair
            document = self.index.get(hit.doc_id)
            assert document is not None  # hits come from the same index
            try:
                return self.verifier.verify(claim.claim_id, claim.text, document)
            except GatewayError:
                return self.verifier.failure_verdict(claim.claim_id, document,
                                                     "gateway-error")

        workers = max(1, min(getattr(self.verifier.gateway, "max_inflight", 1), len(pairs)))
        if workers == 1:
            return [run(pair) for pair in pairs]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, pairs))


def presentation_view(report: AnalysisReport) -> dict[str, Any]:
    """Wire-shape view: NEI suppressed, labels mapped to SUPPORT/REFUTE,
    confidence as a percentage rounded to one decimal. Pure and idempotent
    over the report."""
    claims = []
    for ca in report.claims:
        verdicts = []
        for v in ca.verdicts:
            if v.label == "NEI":
                continue
            doc = report.documents.get(v.doc_id)
            rank = next((h.rank for h in ca.retrieval if h.doc_id == v.doc_id), None)
            verdicts.append({
                "doc_id": v.doc_id,
                "title": doc.title if doc else "",
                "abstract": doc.abstract if doc else "",
                "doi": doc.doi if doc else None,
                "pub_date": v.pub_date,
                "rank": rank,
                "label": display_label(v.label),
                "confidence_pct": round(v.confidence * 100.0, 1)
                if v.confidence is not None else None,
                "evidence_sentences": list(v.evidence_sentences),
                "highlight_spans": [list(s) for s in v.highlight_spans],
                "rationale": v.rationale,
                "flags": list(v.flags),
            })
        claims.append({
            "claim_id": ca.claim.claim_id,
            "text": ca.claim.text,
            "original_text": ca.claim.original_text,
            "refinement_rationale": ca.claim.refinement_rationale,
            "flags": list(ca.claim.flags),
            "verdicts": verdicts,
        })
    return {
        "input_digest": report.input_digest,
        "retrieval_k": report.retrieval_k,
        "claims": claims,
        "suppressed_nei_count": report.suppressed_nei_count,
        "flags": list(report.flags),
    }
