"""HTTP API: analysis endpoint, example catalog, health."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import prompts
from .gateway import GatewayError
from .pipeline import (
    MAX_RETRIEVAL_K,
    MAX_TEXT_CHARS,
    RECOMMENDED_TEXT_CHARS,
    AnalysisPipeline,
    presentation_view,
)

CATEGORIES = ("paper", "news", "social", "patent")

DEFAULT_EXAMPLES_PATH = Path(__file__).parent / "data" / "examples.json"
SCHEMA_PATH = Path(__file__).parent / "schemas" / "api_responses.schema.json"

OVERSIZE_DETAIL = (
    f"text exceeds the {MAX_TEXT_CHARS:,}-character limit; submissions up to "
    f"{RECOMMENDED_TEXT_CHARS:,} characters are recommended for best results"
)


@dataclass(frozen=True)
class ExampleEntry:
    example_id: str
    title: str
    source_url: str
    category: str
    text: str

    def __post_init__(self) -> None:
        if not self.example_id:
            raise ValueError("example_id must be non-empty")
        if not self.title:
            raise ValueError(f"{self.example_id}: title must be non-empty")
        if not self.source_url.startswith(("http://", "https://")):
            raise ValueError(f"{self.example_id}: source_url must be http(s)")
        if self.category not in CATEGORIES:
            raise ValueError(f"{self.example_id}: unknown category {self.category!r}")
        if not 1 <= len(self.text) <= MAX_TEXT_CHARS:
            raise ValueError(f"{self.example_id}: text must be 1..{MAX_TEXT_CHARS} chars")


def load_examples(path: str | Path = DEFAULT_EXAMPLES_PATH) -> list[ExampleEntry]:
    """Load and validate the example catalog, ordered by category then title."""
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(records, list):
        raise ValueError("example catalog must be a JSON array")
    entries = [ExampleEntry(**record) for record in records]
    ids = [e.example_id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("example catalog has duplicate example_id values")
    return sorted(entries, key=lambda e: (e.category, e.title))


def load_response_schema() -> dict[str, Any]:
    """The published JSON Schema document covering every endpoint's responses."""
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def _error(status_code: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"detail": detail})


def create_app(pipeline: AnalysisPipeline | None,
               examples: list[ExampleEntry] | None = None,
               model_id: str = "",
               auth_token: str | None = None,
               max_concurrent: int = 4) -> FastAPI:
    """Build the service; pipeline=None serves 503 on /analyze (corpus not loaded)."""
    if examples is None:
        examples = load_examples()
    app = FastAPI(title="claimscope", docs_url=None, redoc_url=None)
    analyze_gate = threading.Semaphore(max_concurrent)
    examples_by_id = {e.example_id: e for e in examples}

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, "malformed request body")

    def authorized(request: Request) -> bool:
        if auth_token is None:
            return True
        return request.headers.get("Authorization") == f"Bearer {auth_token}"

    @app.post("/analyze")
    def analyze(request: Request, body: dict) -> JSONResponse:  # type: ignore[type-arg]
        if not authorized(request):
            return _error(401, "missing or invalid credentials")
        if not isinstance(body, dict):
            return _error(400, "malformed request body")
        text = body.get("text")
        if not isinstance(text, str) or len(text) < 1:
            return _error(400, "text must be a non-empty string")
        if len(text) > MAX_TEXT_CHARS:
            return _error(413, OVERSIZE_DETAIL)
        k = body.get("k", None)
        if k is not None and (isinstance(k, bool) or not isinstance(k, int)
                              or not 1 <= k <= MAX_RETRIEVAL_K):
            return _error(400, f"k must be an integer in 1..{MAX_RETRIEVAL_K}")
        if pipeline is None:
            return _error(503, "corpus not loaded")
        with analyze_gate:
            try:
                report = pipeline.analyze(text, k=k)
            except GatewayError as exc:
                return _error(502, f"language model gateway failed: {exc}")
        return JSONResponse(content=presentation_view(report))

    @app.get("/examples")
    def list_examples(request: Request) -> JSONResponse:
        if not authorized(request):
            return _error(401, "missing or invalid credentials")
        return JSONResponse(content=[
            {"example_id": e.example_id, "title": e.title,
             "source_url": e.source_url, "category": e.category}
            for e in examples
        ])

    @app.get("/examples/{example_id}")
    def get_example(example_id: str, request: Request) -> JSONResponse:
        if not authorized(request):
            return _error(401, "missing or invalid credentials")
        entry = examples_by_id.get(example_id)
        if entry is None:
            return _error(404, f"unknown example: {example_id}")
        return JSONResponse(content={
            "example_id": entry.example_id, "title": entry.title,
            "source_url": entry.source_url, "category": entry.category,
            "text": entry.text,
        })

    @app.get("/health")
    def health() -> JSONResponse:
        registry = prompts.load_templates()
        prompts_ok = prompts.verify_integrity(registry)
        corpus_ok = pipeline is not None
        return JSONResponse(content={
            "status": "ok" if (prompts_ok and corpus_ok) else "degraded",
            "corpus_doc_count": pipeline.index.doc_count if pipeline else 0,
            "model_id": model_id,
            "prompts_checksum": prompts.combined_checksum(registry),
            "prompts_ok": prompts_ok,
        })

    return app
