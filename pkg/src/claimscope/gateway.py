"""LLM gateway: OpenAI-compatible chat completions over HTTP, plus a scripted mock."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import httpx

ROLES = ("system", "user", "assistant")

# Sleep schedule in seconds, indexed by retry ordinal.
DEFAULT_BACKOFF = (0.25, 1.0, 4.0)


class GatewayError(Exception):
    """Transport- or protocol-level failure after retries are exhausted."""


class ScriptExhaustedError(RuntimeError):
    """A scripted gateway received more calls than its script has entries."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role: {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class TokenLogprob:
    token: str
    logprob: float


@dataclass(frozen=True)
class TokenInfo:
    """One generated token with its logprob and top alternatives (logprob desc)."""

    token: str
    logprob: float
    alternatives: tuple[TokenLogprob, ...] = ()


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024
    logprobs: bool = False
    top_logprobs: int = 10

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("request must contain at least one message")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    tokens: tuple[TokenInfo, ...] | None = None
    model: str | None = None


def _sorted_alternatives(pairs: Iterable[tuple[str, float]]) -> tuple[TokenLogprob, ...]:
    ranked = sorted(pairs, key=lambda p: -p[1])
    return tuple(TokenLogprob(token=t, logprob=lp) for t, lp in ranked)


class HttpGateway:
    """Synchronous client for a vLLM-style /chat/completions endpoint.

    Failed calls are retried up to `retries` times (so retries=2 means three
    attempts total) with the backoff schedule, then raise GatewayError.
    Concurrent in-flight requests are capped by a bounded semaphore.
    """

    def __init__(self, endpoint: str, model: str, api_key: str | None = None,
                 timeout: float = 120.0, retries: int = 2,
                 backoff: Sequence[float] = DEFAULT_BACKOFF,
                 max_inflight: int = 4,
                 sleep: Callable[[float], None] = time.sleep,
                 client: httpx.Client | None = None) -> None:
        if retries < 0:
            raise ValueError("retries must be non-negative")
        if max_inflight < 1:
            raise ValueError("max_inflight must be at least 1")
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.retries = retries
        self.backoff = tuple(backoff)
        self.max_inflight = max_inflight
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(max_inflight)
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.logprobs:
            payload["logprobs"] = True
            payload["top_logprobs"] = request.top_logprobs

        url = f"{self.endpoint}/chat/completions"
        attempts = self.retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                delay = self.backoff[min(attempt - 1, len(self.backoff) - 1)]
                self._sleep(delay)
            try:
                with self._semaphore:
                    response = self._client.post(url, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = GatewayError(f"HTTP {response.status_code} from {url}")
                continue
            if response.status_code != 200:
                raise GatewayError(f"HTTP {response.status_code} from {url}: {response.text[:200]}")
            try:
                return self._parse(response.json())
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise GatewayError(f"malformed completion payload: {exc}") from exc
        raise GatewayError(f"gateway unreachable after {attempts} attempts: {last_error}")

    def _parse(self, data: dict) -> CompletionResponse:
        choice = data["choices"][0]
        text = choice["message"]["content"] or ""
        tokens = None
        logprobs = choice.get("logprobs")
        if logprobs and logprobs.get("content"):
            tokens = tuple(
                TokenInfo(
                    token=item["token"],
                    logprob=float(item["logprob"]),
                    alternatives=_sorted_alternatives(
                        (alt["token"], float(alt["logprob"]))
                        for alt in item.get("top_logprobs", ())
                    ),
                )
                for item in logprobs["content"]
            )
        return CompletionResponse(text=text, tokens=tokens, model=data.get("model"))

    def close(self) -> None:
        self._client.close()


@dataclass
class ScriptEntry:
    text: str
    tokens: tuple[TokenInfo, ...] | None = None


class ScriptedGateway:
    """Deterministic gateway that replays a fixed script of responses in call order.

    max_inflight defaults to 1 so callers that fan out degrade to serial
    execution, keeping script consumption (and reports built from it)
    deterministic. Calling past the end raises ScriptExhaustedError.
    """

    def __init__(self, script: Sequence[ScriptEntry | str], model: str = "scripted") -> None:
        if not script:
            raise ValueError("script must contain at least one entry")
        self._entries = [ScriptEntry(text=e) if isinstance(e, str) else e for e in script]
        self._cursor = 0
        self._lock = threading.Lock()
        self.model = model
        self.max_inflight = 1
        self.requests: list[CompletionRequest] = []

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        with self._lock:
            if self._cursor >= len(self._entries):
                raise ScriptExhaustedError(
                    f"script exhausted after {len(self._entries)} entries"
                )
            entry = self._entries[self._cursor]
            self._cursor += 1
            self.requests.append(request)
        return CompletionResponse(text=entry.text, tokens=entry.tokens, model=self.model)

    @property
    def calls_made(self) -> int:
        return self._cursor

    def close(self) -> None:
        pass


def mock_from_script(script: Sequence[ScriptEntry | str]) -> ScriptedGateway:
    """Build a gateway that replays `script`; empty scripts are rejected."""
    return ScriptedGateway(script)


def script_entry_from_record(record: dict) -> ScriptEntry:
    """Parse one JSONL script record: {"text": ..., "tokens": [...]?}."""
    text = record.get("text")
    if not isinstance(text, str):
        raise ValueError("script record needs a string 'text' field")
    tokens = None
    if record.get("tokens") is not None:
        tokens = tuple(
            TokenInfo(
                token=item["token"],
                logprob=float(item["logprob"]),
                alternatives=_sorted_alternatives(
                    (t, float(lp)) for t, lp in item.get("alternatives", ())
                ),
            )
            for item in record["tokens"]
        )
    return ScriptEntry(text=text, tokens=tokens)


def scripted_gateway_from_jsonl(path: str | Path) -> ScriptedGateway:
    """Load a scripted gateway from a JSONL file of script records."""
    entries: list[ScriptEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entries.append(script_entry_from_record(json.loads(line)))
    return ScriptedGateway(entries)
