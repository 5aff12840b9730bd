"""Shared test helpers: document factories and scripted token streams."""

from __future__ import annotations

import json
import re

import pytest

from claimscope.corpus import CorpusIndex, Document, IndexConfig
from claimscope.gateway import ScriptEntry, TokenInfo, TokenLogprob


def make_doc(doc_id: str, abstract: str, title: str = "", doi: str | None = None,
             pub_date: str | None = None, citations: int = 0) -> Document:
    return Document(doc_id=doc_id, title=title, abstract=abstract,
                    influential_citations=citations, doi=doi, pub_date=pub_date)


def verdict_text(label: str, evidence: list[str] | None = None,
                 rationale: str = "because") -> str:
    return json.dumps({"response": label, "evidence": evidence or [],
                       "rationale": rationale})


def label_token_stream(text: str, alternatives: list[tuple[str, float]]):
    """Tokens reconstructing `text`, with alternatives at the label position.

    The label value inside "response" becomes a single token whose own logprob
    is the matching entry from `alternatives`; surrounding text is chunked so
    the char-to-token mapping is exercised across several tokens.
    """
    match = re.search(r'"response"\s*:\s*"', text)
    assert match, "text has no response field"
    start = match.end()
    end = text.index('"', start)
    label = text[start:end]
    own = next((lp for tok, lp in alternatives if tok.strip().strip('"') == label), -0.1)
    tokens: list[TokenInfo] = []
    prefix = text[:start]
    mid = len(prefix) // 2
    for chunk in (prefix[:mid], prefix[mid:]):
        if chunk:
            tokens.append(TokenInfo(token=chunk, logprob=-0.001))
    alts = tuple(sorted((TokenLogprob(tok, lp) for tok, lp in alternatives),
                        key=lambda a: -a.logprob))
    tokens.append(TokenInfo(token=label, logprob=own, alternatives=alts))
    rest = text[end:]
    if rest:
        tokens.append(TokenInfo(token=rest, logprob=-0.001))
    return tuple(tokens)


def scripted_verdict(label: str, evidence: list[str] | None = None,
                     alternatives: list[tuple[str, float]] | None = None,
                     rationale: str = "because") -> ScriptEntry:
    text = verdict_text(label, evidence, rationale)
    tokens = label_token_stream(text, alternatives) if alternatives else None
    return ScriptEntry(text=text, tokens=tokens)


@pytest.fixture
def two_doc_index() -> CorpusIndex:
    docs = [
        make_doc("d1", "Cold exposure increases brown fat activity. "
                       "The effect was strongest in young adults.",
                 title="Brown fat thermogenesis", doi="10.1000/d1",
                 pub_date="2021-03-01"),
        make_doc("d2", "We found no link between cold showers and metabolism. "
                       "Sample size was large.",
                 title="Cold shower metabolism study", doi="10.1000/d2",
                 pub_date="2019-07-15"),
    ]
    return CorpusIndex(docs, IndexConfig())
