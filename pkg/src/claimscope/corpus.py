"""Document corpus: JSONL ingestion and an Okapi BM25 index over title+abstract."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, TextIO

INDEX_FORMAT_VERSION = 1

# \w minus underscore: lowercase alphanumeric runs, unicode-aware.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class CorpusError(Exception):
    """Raised for unrecoverable corpus problems (bad config, bad index dir)."""


class DuplicateDocIdError(CorpusError):
    """Raised when two records share a doc_id; duplicates always abort."""


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs, dropping empty tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    abstract: str
    influential_citations: int
    doi: str | None = None
    pub_date: str | None = None

    @classmethod
    def from_record(cls, record: dict) -> "Document":
        """Build a validated Document from a parsed JSONL record."""
        if not isinstance(record, dict):
            raise ValueError("record is not a JSON object")
        doc_id = record.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise ValueError("missing or empty doc_id")
        title = record.get("title")
        if not isinstance(title, str):
            raise ValueError("missing title")
        abstract = record.get("abstract")
        if not isinstance(abstract, str) or not abstract.split():
            raise ValueError("abstract is missing or blank")
        cites = record.get("influential_citations")
        if isinstance(cites, bool) or not isinstance(cites, int) or cites < 0:
            raise ValueError("influential_citations must be a non-negative integer")
        doi = record.get("doi")
        if doi is not None and not isinstance(doi, str):
            raise ValueError("doi must be a string when present")
        pub_date = record.get("pub_date")
        if pub_date is not None:
            if not isinstance(pub_date, str):
                raise ValueError("pub_date must be an ISO date string when present")
            try:
                date.fromisoformat(pub_date)
            except ValueError as exc:
                raise ValueError(f"pub_date is not an ISO date: {pub_date!r}") from exc
        return cls(
            doc_id=doc_id,
            title=title,
            abstract=abstract,
            influential_citations=cites,
            doi=doi,
            pub_date=pub_date,
        )


@dataclass(frozen=True)
class IndexConfig:
    k1: float = 1.2
    b: float = 0.75
    min_influential_citations: int = 0
    tokenizer: str = "simple"

    def __post_init__(self) -> None:
        if not self.k1 > 0:
            raise CorpusError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise CorpusError(f"b must be in [0, 1], got {self.b}")
        if self.min_influential_citations < 0:
            raise CorpusError("min_influential_citations must be non-negative")
        if self.tokenizer != "simple":
            raise CorpusError(f"unknown tokenizer: {self.tokenizer!r}")


@dataclass(frozen=True)
class EvidenceHit:
    doc_id: str
    score: float
    rank: int  # 1-based


@dataclass(frozen=True)
class IngestError:
    line: int  # 1-based line number in the input
    message: str


class CorpusIndex:
    """BM25 inverted index. Built once by a single writer, immutable after."""

    def __init__(self, docs: list[Document], config: IndexConfig,
                 skipped_count: int = 0,
                 ingest_errors: list[IngestError] | None = None) -> None:
        self.config = config
        self.skipped_count = skipped_count
        self.ingest_errors = list(ingest_errors or [])
        self._docs = list(docs)
        self._by_id: dict[str, int] = {}
        for i, doc in enumerate(self._docs):
            if doc.doc_id in self._by_id:
                raise DuplicateDocIdError(f"duplicate doc_id: {doc.doc_id!r}")
            self._by_id[doc.doc_id] = i
        self._build()

    def _build(self) -> None:
        # Title and abstract are scored as one concatenated field.
        self._postings: dict[str, list[tuple[int, int]]] = {}
        self._lengths: list[int] = []
        for i, doc in enumerate(self._docs):
            tokens = tokenize(doc.title) + tokenize(doc.abstract)
            self._lengths.append(len(tokens))
            for token, tf in Counter(tokens).items():
                self._postings.setdefault(token, []).append((i, tf))
        n = len(self._docs)
        self._avgdl = (sum(self._lengths) / n) if n else 0.0

    @property
    def doc_count(self) -> int:
        return len(self._docs)

    def __len__(self) -> int:
        return len(self._docs)

    def get(self, doc_id: str) -> Document | None:
        i = self._by_id.get(doc_id)
        return self._docs[i] if i is not None else None

    def documents(self) -> list[Document]:
        return list(self._docs)

    def idf(self, token: str) -> float:
        """ln(1 + (N - df + 0.5) / (df + 0.5)); strictly positive for df >= 0."""
        df = len(self._postings.get(token, ()))
        return math.log(1.0 + (len(self._docs) - df + 0.5) / (df + 0.5))

    def search(self, query: str, k: int) -> list[EvidenceHit]:
        """Top-k BM25 hits, ties broken by doc_id; only overlapping docs returned.

        Contributions accumulate in query-token order, so repeated query terms
        weight proportionally and scores are reproducible bit-for-bit.
        """
        if k < 1:
            raise CorpusError(f"k must be at least 1, got {k}")
        k1, b = self.config.k1, self.config.b
        scores: dict[int, float] = {}
        for token in tokenize(query):
            postings = self._postings.get(token)
            if not postings:
                continue
            idf = self.idf(token)
            for i, tf in postings:
                norm = 1.0 - b + b * self._lengths[i] / self._avgdl if self._avgdl else 1.0
                gain = idf * tf * (k1 + 1.0) / (tf + k1 * norm)
                scores[i] = scores.get(i, 0.0) + gain
        ranked = sorted(scores.items(), key=lambda item: (-item[1], self._docs[item[0]].doc_id))
        return [
            EvidenceHit(doc_id=self._docs[i].doc_id, score=score, rank=rank)
            for rank, (i, score) in enumerate(ranked[:k], start=1)
        ]

    def save(self, path: str | Path) -> None:
        """Write a versioned index directory (meta.json, docs.jsonl, postings.json)."""
        out = Path(path)
        out.mkdir(parents=True, exist_ok=True)
        meta = {
            "format_version": INDEX_FORMAT_VERSION,
            "config": asdict(self.config),
            "doc_count": len(self._docs),
            "skipped_count": self.skipped_count,
        }
        (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        with (out / "docs.jsonl").open("w", encoding="utf-8") as fh:
            for doc in self._docs:
                fh.write(json.dumps(asdict(doc), sort_keys=True) + "\n")
        postings = {token: [[i, tf] for i, tf in plist] for token, plist in self._postings.items()}
        payload = {"lengths": self._lengths, "postings": postings}
        (out / "postings.json").write_text(json.dumps(payload) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        """Reopen a saved index; search results are identical to pre-save."""
        root = Path(path)
        meta_path = root / "meta.json"
        if not meta_path.is_file():
            raise CorpusError(f"not an index directory: {root}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        version = meta.get("format_version")
        if version != INDEX_FORMAT_VERSION:
            raise CorpusError(
                f"unsupported index format version {version!r}, expected {INDEX_FORMAT_VERSION}"
            )
        config = IndexConfig(**meta["config"])
        docs = []
        with (root / "docs.jsonl").open("r", encoding="utf-8") as fh:
            for line in fh:
                docs.append(Document.from_record(json.loads(line)))
        index = cls.__new__(cls)
        index.config = config
        index.skipped_count = meta.get("skipped_count", 0)
        index.ingest_errors = []
        index._docs = docs
        index._by_id = {doc.doc_id: i for i, doc in enumerate(docs)}
        payload = json.loads((root / "postings.json").read_text(encoding="utf-8"))
        index._lengths = list(payload["lengths"])
        index._postings = {
            token: [(int(i), int(tf)) for i, tf in plist]
            for token, plist in payload["postings"].items()
        }
        n = len(docs)
        index._avgdl = (sum(index._lengths) / n) if n else 0.0
        return index


def ingest(source: str | Path | TextIO | Iterable[str],
           config: IndexConfig | None = None,
           strict: bool = False) -> CorpusIndex:
    """Read JSONL records into a CorpusIndex.

    Malformed records become per-record IngestErrors carrying the 1-based line
    number and ingestion continues; with strict=True the first one aborts.
    Records below the influential-citations threshold are skipped and counted.
    A duplicate doc_id always aborts.
    """
    config = config or IndexConfig()
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return ingest(fh, config=config, strict=strict)

    docs: list[Document] = []
    seen: dict[str, int] = {}
    errors: list[IngestError] = []
    skipped = 0
    for line_no, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            doc = Document.from_record(record)
        except (ValueError, TypeError) as exc:
            err = IngestError(line=line_no, message=str(exc))
            if strict:
                raise CorpusError(f"line {line_no}: {err.message}") from exc
            errors.append(err)
            continue
        if doc.doc_id in seen:
            raise DuplicateDocIdError(
                f"duplicate doc_id: {doc.doc_id!r} (lines {seen[doc.doc_id]} and {line_no})"
            )
        seen[doc.doc_id] = line_no
        if doc.influential_citations < config.min_influential_citations:
            skipped += 1
            continue
        docs.append(doc)
    return CorpusIndex(docs, config, skipped_count=skipped, ingest_errors=errors)
