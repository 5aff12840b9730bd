"""Aggregate run report: joins phase summaries into one table plus system score."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .judge import QUESTION_ORDER
from .metrics import system_score
from .phases import read_jsonl


def _load_summary(run_dir: Path, name: str) -> dict | None:
    path = run_dir / name
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def _time_per_doc_s(run_dir: Path) -> float | None:
    path = run_dir / "timings.jsonl"
    if not path.is_file():
        return None
    rows = read_jsonl(path)
    totals = [row["total_ms"] for row in rows if isinstance(row.get("total_ms"), (int, float))]
    if not totals:
        return None
    return sum(totals) / len(totals) / 1000.0


def build_report(run_dir: str | Path) -> dict[str, Any]:
    """Collect whatever phases have run; absent pieces stay absent, never 0/0."""
    run = Path(run_dir)
    phase1 = _load_summary(run, "phase1_summary.json")
    phase2 = _load_summary(run, "phase2_summary.json")
    phase3 = _load_summary(run, "phase3_summary.json")

    correct_fraction = phase1.get("correct_claim_fraction") if phase1 else None
    label_acc_correct = None
    if phase3 and phase3.get("correct_only"):
        label_acc_correct = phase3["correct_only"].get("label_accuracy")
    score = None
    if correct_fraction is not None and label_acc_correct is not None:
        score = system_score(correct_fraction, label_acc_correct)

    return {
        "phase1": phase1,
        "phase2": phase2,
        "phase3": phase3,
        "system_score": score,
        "time_per_doc_s": _time_per_doc_s(run),
    }


def _fmt(value: float | None, digits: int = 4) -> str | None:
    return None if value is None else f"{value:.{digits}f}"


def render_report_text(report: dict[str, Any]) -> str:
    """Two-column text table; cells without data are omitted entirely."""
    lines: list[str] = []

    def add(label: str, value: str | None) -> None:
        if value is not None:
            lines.append(f"{label:<32}{value}")

    phase1 = report.get("phase1")
    if phase1:
        for label, key in (("documents judged", "n_documents"),
                           ("claims judged", "n_claims"),
                           ("claims excluded (incomplete)", "n_incomplete")):
            if phase1.get(key):
                add(label, str(phase1[key]))
        for q in QUESTION_ORDER:
            add(f"{q} yes-rate", _fmt(phase1.get("per_question_yes_rate", {}).get(q)))
        add("correct claim fraction", _fmt(phase1.get("correct_claim_fraction")))
        gold = phase1.get("gold_metrics")
        if gold:
            add("gold match precision", _fmt(gold.get("match_precision")))
            add("gold match recall", _fmt(gold.get("match_recall")))
            for key in ("rouge1", "rouge2", "rougeL"):
                add(f"gold {key} f1", _fmt(gold["rouge_f1"].get(key)))

    phase2 = report.get("phase2")
    if phase2:
        for scope, key in (("all", "recall"), ("correct", "recall_correct")):
            recalls = phase2.get(key)
            if recalls:
                for k in sorted(recalls, key=int):
                    add(f"recall@{k} ({scope})", _fmt(recalls[k]))

    phase3 = report.get("phase3")
    if phase3:
        for scope, key in (("all", "all"), ("correct", "correct_only")):
            block = phase3.get(key)
            if block:
                add(f"label accuracy ({scope})", _fmt(block.get("label_accuracy")))
                add(f"not-NEI rate ({scope})", _fmt(block.get("not_nei_rate")))

    add("system score", _fmt(report.get("system_score")))
    time_per_doc = report.get("time_per_doc_s")
    if time_per_doc is not None:
        add("time per document", f"{time_per_doc:.2f} s")
    return "\n".join(lines) + "\n"


def write_report(run_dir: str | Path) -> dict[str, Any]:
    """Build the report and write report.json / report.txt into the run dir."""
    run = Path(run_dir)
    report = build_report(run)
    (run / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (run / "report.txt").write_text(render_report_text(report), encoding="utf-8")
    return report
