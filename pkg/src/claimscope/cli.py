"""Command line interface: corpus ingestion, serving, analysis, and evaluation."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import AppConfig, build_gateway, load_config
from .corpus import CorpusError, CorpusIndex, IndexConfig, ingest
from .evalharness import phases
from .evalharness.metrics import MatchConfig
from .evalharness.report import render_report_text, write_report
from .extraction import ClaimExtractor
from .pipeline import AnalysisPipeline, presentation_view
from .service import create_app, load_examples
from .verification import ClaimVerifier


def _load_app_config(config_path: str | None, corpus: str | None,
                     endpoint: str | None, model: str | None) -> AppConfig:
    config = load_config(config_path)
    if corpus:
        config.corpus_dir = corpus
    if endpoint:
        config.gateway.endpoint = endpoint
    if model:
        config.gateway.model = model
    return config


def _open_index(config: AppConfig) -> CorpusIndex:
    if not config.corpus_dir:
        raise click.ClickException("no corpus index configured (use --corpus)")
    try:
        return CorpusIndex.load(config.corpus_dir)
    except (CorpusError, OSError) as exc:
        raise click.ClickException(f"cannot open corpus index: {exc}")


def _build_pipeline(config: AppConfig) -> AnalysisPipeline:
    index = _open_index(config)
    try:
        gateway = build_gateway(config.gateway)
    except (ValueError, OSError) as exc:
        raise click.ClickException(str(exc))
    extractor = ClaimExtractor(gateway, mode=config.prompt_mode,
                               candidate_cap=config.candidate_cap)
    verifier = ClaimVerifier(gateway)
    return AnalysisPipeline(index, extractor, verifier,
                            retrieval_k=config.retrieval_k)


def _judge_gateway(config: AppConfig, judge: str | None, judge_model: str | None):
    if judge:
        config.judge.endpoint = judge
    if judge_model:
        config.judge.model = judge_model
    try:
        return build_gateway(config.judge)
    except (ValueError, OSError) as exc:
        raise click.ClickException(f"judge gateway: {exc}")


@click.group()
def main() -> None:
    """Scientific claim analysis and evaluation."""


@main.command("ingest")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--k1", default=1.2, show_default=True, type=float)
@click.option("--b", default=0.75, show_default=True, type=float)
@click.option("--min-citations", default=0, show_default=True, type=int,
              help="Keep only documents with at least this many influential citations.")
@click.option("--strict", is_flag=True, help="Abort on the first malformed record.")
def ingest_cmd(input_path: str, out_dir: str, k1: float, b: float,
               min_citations: int, strict: bool) -> None:
    """Build a BM25 index directory from a JSONL corpus."""
    try:
        config = IndexConfig(k1=k1, b=b, min_influential_citations=min_citations)
        index = ingest(input_path, config=config, strict=strict)
    except CorpusError as exc:
        raise click.ClickException(str(exc))
    index.save(out_dir)
    for error in index.ingest_errors:
        click.echo(f"line {error.line}: {error.message}", err=True)
    click.echo(f"indexed {index.doc_count} documents "
               f"({index.skipped_count} below citation threshold, "
               f"{len(index.ingest_errors)} malformed)")


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--corpus", type=click.Path(exists=True))
@click.option("--endpoint", help="Chat-completions endpoint URL or mock:<script.jsonl>.")
@click.option("--model")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def serve_cmd(config_path, corpus, endpoint, model, host, port) -> None:
    """Run the HTTP API."""
    import uvicorn

    config = _load_app_config(config_path, corpus, endpoint, model)
    pipeline = _build_pipeline(config)
    examples = load_examples(config.examples_path) if config.examples_path \
        else load_examples()
    app = create_app(pipeline, examples=examples, model_id=config.gateway.model,
                     auth_token=config.auth_token,
                     max_concurrent=config.max_concurrent)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command("analyze")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--corpus", type=click.Path(exists=True))
@click.option("--endpoint")
@click.option("--model")
@click.option("--text")
@click.option("--file", "file_path", type=click.Path(exists=True))
@click.option("--k", default=None, type=int)
@click.option("--view", type=click.Choice(["report", "presentation"]),
              default="report", show_default=True)
def analyze_cmd(config_path, corpus, endpoint, model, text, file_path, k, view) -> None:
    """Analyze one text and print the result as JSON."""
    config = _load_app_config(config_path, corpus, endpoint, model)
    if text is None and file_path:
        text = Path(file_path).read_text(encoding="utf-8")
    if text is None:
        text = sys.stdin.read()
    pipeline = _build_pipeline(config)
    try:
        report = pipeline.analyze(text, k=k)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    payload = report.to_dict() if view == "report" else presentation_view(report)
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True))


@main.command("run-pipeline")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--corpus", type=click.Path(exists=True))
@click.option("--endpoint")
@click.option("--model")
@click.option("--docs", "docs_path", required=True, type=click.Path(exists=True),
              help='JSONL of {"doc_id": ..., "text": ...} records to analyze.')
@click.option("--out", "run_dir", required=True, type=click.Path())
@click.option("--k", default=None, type=int)
def run_pipeline_cmd(config_path, corpus, endpoint, model, docs_path, run_dir, k) -> None:
    """Analyze a document set and write evaluation inputs into a run directory."""
    config = _load_app_config(config_path, corpus, endpoint, model)
    pipeline = _build_pipeline(config)
    run = Path(run_dir)
    run.mkdir(parents=True, exist_ok=True)
    claims_rows, retrieval_rows, label_rows, timing_rows = [], [], [], []
    for record in phases.read_jsonl(docs_path):
        doc_id, text = record["doc_id"], record["text"]
        report = pipeline.analyze(text, k=k)
        claims_rows.append({
            "doc_id": doc_id,
            "paragraph": text,
            "claims": [ca.claim.text for ca in report.claims],
        })
        for ca in report.claims:
            paragraphs = []
            for hit in ca.retrieval:
                doc = report.documents[hit.doc_id]
                paragraphs.append(doc.abstract)
            retrieval_rows.append({"doc_id": doc_id, "claim": ca.claim.text,
                                   "paragraphs": paragraphs})
            for verdict in ca.verdicts:
                doc = report.documents[verdict.doc_id]
                label_rows.append({
                    "doc_id": doc_id,
                    "claim": ca.claim.text,
                    "paragraph": doc.abstract,
                    "predicted_label": verdict.label,
                })
        timing_rows.append({"doc_id": doc_id,
                            "total_ms": report.timings_ms["total_ms"]})
    phases.write_jsonl(run / "claims.jsonl", claims_rows)
    phases.write_jsonl(run / "retrieval.jsonl", retrieval_rows)
    phases.write_jsonl(run / "labels.jsonl", label_rows)
    phases.write_jsonl(run / "timings.jsonl", timing_rows)
    click.echo(f"wrote run inputs for {len(claims_rows)} documents to {run}")


def _run_option(func):
    return click.option("--run", "run_dir", required=True,
                        type=click.Path(exists=True, file_okay=False))(func)


@main.command("eval-claims")
@click.option("--config", "config_path", type=click.Path(exists=True))
@_run_option
@click.option("--judge", help="Judge endpoint URL or mock:<script.jsonl>.")
@click.option("--judge-model")
@click.option("--gold", "gold_path", type=click.Path(exists=True),
              help='JSONL of {"doc_id": ..., "claims": [...]} gold claims.')
@click.option("--threshold", default=0.3, show_default=True, type=float,
              help="Levenshtein similarity floor for gold matching.")
@click.option("--sample", default=120, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def eval_claims_cmd(config_path, run_dir, judge, judge_model, gold_path,
                    threshold, sample, seed) -> None:
    """Phase 1: claim-quality questionnaire, plus optional gold-claim metrics."""
    run = Path(run_dir)
    records = phases.read_jsonl(run / "claims.jsonl")
    config = load_config(config_path)
    summary: dict = {}
    if judge or config.judge.endpoint:
        gateway = _judge_gateway(config, judge, judge_model)
        rows, summary = phases.run_claim_quality_phase(
            gateway, records, sample=sample, seed=seed)
        phases.write_jsonl(run / "phase1.jsonl", rows)
    elif not gold_path:
        raise click.ClickException("nothing to evaluate: provide --judge or --gold")
    if gold_path:
        gold = phases.read_jsonl(gold_path)
        summary["gold_metrics"] = phases.claim_match_metrics(
            records, gold, MatchConfig(threshold=threshold))
    phases.write_summary(run / "phase1_summary.json", summary)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command("eval-retrieval")
@click.option("--config", "config_path", type=click.Path(exists=True))
@_run_option
@click.option("--judge")
@click.option("--judge-model")
@click.option("--sample", default=None, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def eval_retrieval_cmd(config_path, run_dir, judge, judge_model, sample, seed) -> None:
    """Phase 2: judge retrieved paragraphs and compute recall@k."""
    run = Path(run_dir)
    records = phases.read_jsonl(run / "retrieval.jsonl")
    records = _with_phase1_correctness(run, records)
    gateway = _judge_gateway(load_config(config_path), judge, judge_model)
    rows, summary = phases.run_retrieval_phase(gateway, records,
                                               sample=sample, seed=seed)
    phases.write_jsonl(run / "phase2.jsonl", rows)
    phases.write_summary(run / "phase2_summary.json", summary)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command("eval-labels")
@click.option("--config", "config_path", type=click.Path(exists=True))
@_run_option
@click.option("--judge")
@click.option("--judge-model")
@click.option("--sample", default=None, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def eval_labels_cmd(config_path, run_dir, judge, judge_model, sample, seed) -> None:
    """Phase 3: judge predicted labels and compute accuracy and Not-NEI rates."""
    run = Path(run_dir)
    records = phases.read_jsonl(run / "labels.jsonl")
    records = _with_phase1_correctness(run, records)
    gateway = _judge_gateway(load_config(config_path), judge, judge_model)
    rows, summary = phases.run_label_phase(gateway, records, sample=sample, seed=seed)
    phases.write_jsonl(run / "phase3.jsonl", rows)
    phases.write_summary(run / "phase3_summary.json", summary)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


def _with_phase1_correctness(run: Path, records: list[dict]) -> list[dict]:
    phase1_path = run / "phase1.jsonl"
    if not phase1_path.is_file():
        return records
    return phases.join_correctness(records, phases.read_jsonl(phase1_path))


@main.command("report")
@_run_option
def report_cmd(run_dir) -> None:
    """Write report.json / report.txt for a run and print the table."""
    report = write_report(run_dir)
    click.echo(render_report_text(report), nl=False)


if __name__ == "__main__":
    main()
