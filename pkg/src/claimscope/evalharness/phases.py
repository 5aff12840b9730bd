"""Three-phase evaluation runners over line-delimited JSON run directories.

Run layout: claims.jsonl / retrieval.jsonl / labels.jsonl inputs (as written by
`claimscope run-pipeline`), phaseN.jsonl row outputs, phaseN_summary.json
aggregates, and optional timings.jsonl for time-per-document reporting.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Iterable, Sequence

from ..verification import canonical_label
from .judge import (
    QUESTION_ORDER,
    judge_claim_quality,
    judge_label_correctness,
    judge_retrieval_relevance,
)
from .metrics import MatchConfig, match_claims, recall_at_k, rouge

DEFAULT_SAMPLE = 120
RECALL_KS = (1, 3, 5)


def read_jsonl(path: str | Path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError(f"{path}:{line_no}: record is not a JSON object")
            records.append(record)
    return records


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


def write_summary(path: str | Path, summary: dict) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def sample_records(records: Sequence[dict], sample: int | None, seed: int) -> list[dict]:
    """Deterministic sample preserving input order; None or oversize keeps all."""
    if sample is None or sample >= len(records):
        return list(records)
    if sample < 1:
        raise ValueError("sample must be at least 1")
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(records)), sample))
    return [records[i] for i in picked]


def _fraction(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator else None


def run_claim_quality_phase(gateway, records: Sequence[dict],
                            sample: int | None = DEFAULT_SAMPLE,
                            seed: int = 0) -> tuple[list[dict], dict]:
    """Phase 1: questionnaire over {"doc_id", "paragraph", "claims": [...]} records."""
    sampled = sample_records(records, sample, seed)
    rows: list[dict] = []
    for record in sampled:
        doc_id = record.get("doc_id", "")
        paragraph = record["paragraph"]
        for claim in record["claims"]:
            result = judge_claim_quality(gateway, claim, paragraph)
            rows.append({
                "doc_id": doc_id,
                "claim": claim,
                "answers": {
                    q: {"answer": a.answer, "rationale": a.rationale,
                        "flags": list(a.flags)}
                    for q, a in result.answers.items()
                },
                "correct": result.correct,
                "incomplete": result.incomplete,
            })
    complete = [r for r in rows if not r["incomplete"]]
    summary = {
        "n_documents": len(sampled),
        "n_claims": len(rows),
        "n_incomplete": len(rows) - len(complete),
        "per_question_yes_rate": {
            q: _fraction(sum(1 for r in complete if r["answers"][q]["answer"]),
                         len(complete))
            for q in QUESTION_ORDER
        },
        "correct_claim_fraction": _fraction(
            sum(1 for r in complete if r["correct"]), len(complete)
        ),
    }
    return rows, summary


def claim_match_metrics(records: Sequence[dict], gold_records: Sequence[dict],
                        config: MatchConfig | None = None) -> dict:
    """Gold-based extraction metrics: Levenshtein matching plus ROUGE on matches."""
    config = config or MatchConfig()
    gold_by_doc = {r["doc_id"]: list(r["claims"]) for r in gold_records}
    n_generated = n_gold = n_matched = 0
    matched_gold = 0
    rouge_sums = {"rouge1": 0.0, "rouge2": 0.0, "rougeL": 0.0}
    for record in records:
        generated = list(record["claims"])
        gold = gold_by_doc.get(record.get("doc_id", ""), [])
        n_generated += len(generated)
        n_gold += len(gold)
        if not generated or not gold:
            continue
        matches = match_claims(generated, gold, config)
        n_matched += len(matches)
        matched_gold += len({m.gold_index for m in matches})
        for m in matches:
            scores = rouge(generated[m.generated_index], gold[m.gold_index])
            for key in rouge_sums:
                rouge_sums[key] += scores[key]
    return {
        "threshold": config.threshold,
        "n_generated": n_generated,
        "n_gold": n_gold,
        "n_matched": n_matched,
        "match_precision": _fraction(n_matched, n_generated),
        "match_recall": _fraction(matched_gold, n_gold),
        "rouge_f1": {key: (total / n_matched if n_matched else None)
                     for key, total in rouge_sums.items()},
    }


def run_retrieval_phase(gateway, records: Sequence[dict],
                        ks: Sequence[int] = RECALL_KS,
                        sample: int | None = None,
                        seed: int = 0) -> tuple[list[dict], dict]:
    """Phase 2: relevance judging over {"claim", "paragraphs": [...]} records."""
    sampled = sample_records(records, sample, seed)
    rows: list[dict] = []
    for record in sampled:
        claim = record["claim"]
        relevance: list[bool | None] = []
        flags: list[str] = []
        for paragraph in record["paragraphs"]:
            answer = judge_retrieval_relevance(gateway, claim, paragraph)
            relevance.append(answer.answer)
            flags.extend(answer.flags)
        rows.append({
            "doc_id": record.get("doc_id", ""),
            "claim": claim,
            "relevance": relevance,
            "correct": record.get("correct"),
            "incomplete": any(r is None for r in relevance),
            "flags": sorted(set(flags)),
        })
    complete = [r for r in rows if not r["incomplete"]]
    correct_rows = [r for r in complete if r["correct"] is True]
    summary = {
        "n_claims": len(rows),
        "n_incomplete": len(rows) - len(complete),
        "n_correct_claims": len(correct_rows) if any(
            r["correct"] is not None for r in rows) else None,
        "recall": {str(k): v for k, v in recall_at_k(
            [r["relevance"] for r in complete], ks).items()} if complete else None,
        "recall_correct": {str(k): v for k, v in recall_at_k(
            [r["relevance"] for r in correct_rows], ks).items()} if correct_rows else None,
    }
    return rows, summary


def run_label_phase(gateway, records: Sequence[dict],
                    sample: int | None = None,
                    seed: int = 0) -> tuple[list[dict], dict]:
    """Phase 3: label-correctness judging over claim/paragraph/predicted_label rows.

    NEI predictions are never judged; they count against the Not-NEI rate and
    are excluded from label accuracy.
    """
    sampled = sample_records(records, sample, seed)
    rows: list[dict] = []
    for record in sampled:
        label = canonical_label(record["predicted_label"])
        if label is None:
            raise ValueError(f"unknown predicted_label: {record['predicted_label']!r}")
        answer = judge_label_correctness(gateway, record["claim"],
                                         record["paragraph"], label)
        rows.append({
            "doc_id": record.get("doc_id", ""),
            "claim": record["claim"],
            "predicted_label": label,
            "judged": answer is not None,
            "label_correct": None if answer is None else answer.answer,
            "rationale": "" if answer is None else answer.rationale,
            "correct": record.get("correct"),
            "flags": [] if answer is None else sorted(set(answer.flags)),
        })

    def aggregate(subset: list[dict]) -> dict:
        n_pairs = len(subset)
        non_nei = [r for r in subset if r["predicted_label"] != "NEI"]
        judged = [r for r in non_nei if r["label_correct"] is not None]
        return {
            "n_pairs": n_pairs,
            "n_nei": n_pairs - len(non_nei),
            "n_incomplete": len(non_nei) - len(judged),
            "not_nei_rate": _fraction(len(non_nei), n_pairs),
            "label_accuracy": _fraction(
                sum(1 for r in judged if r["label_correct"]), len(judged)),
        }

    has_correct = any(r["correct"] is not None for r in rows)
    correct_rows = [r for r in rows if r["correct"] is True]
    summary = {
        "all": aggregate(rows),
        "correct_only": aggregate(correct_rows) if has_correct and correct_rows else None,
    }
    return rows, summary


def join_correctness(rows: Sequence[dict], phase1_rows: Sequence[dict]) -> list[dict]:
    """Attach phase-1 correctness to later-phase records by (doc_id, claim)."""
    verdict_by_claim: dict[tuple[str, str], bool] = {}
    for row in phase1_rows:
        if not row.get("incomplete"):
            verdict_by_claim[(row.get("doc_id", ""), row["claim"])] = bool(row["correct"])
    joined = []
    for row in rows:
        updated = dict(row)
        if updated.get("correct") is None:
            updated["correct"] = verdict_by_claim.get(
                (row.get("doc_id", ""), row["claim"]))
        joined.append(updated)
    return joined
