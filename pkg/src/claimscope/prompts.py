"""Prompt templates: checksum-pinned files, placeholder substitution, message splitting.

Template bodies contain literal JSON braces, so rendering replaces only the
five named placeholder tokens and never touches other braces.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .gateway import ChatMessage

PLACEHOLDERS = ("{text}", "{claim}", "{evidence}", "{QUESTION}", "{SUPPORTED/REFUTED}")

SYSTEM_MARKER = "<|begin_of_text|><|start_header_id|>system<|end_header_id|>"
USER_MARKER = "<|begin_of_text|><|start_header_id|>user<|end_header_id|>"

# SHA-256 of each template file; verified at load time and in tests.
EXPECTED_CHECKSUMS = {
    "extract_base": "b415d3e0680fe7b4f03ae3acc4462a08f6a0fcb19dc8ee1d944d44162fe4a862",
    "extract_cdp": "ceb03a4dea153ec97f0bc6141616278d1ed46cc6e8e07a15718cb8e9c2f44dbc",
    "refine_followup": "966f14a70cb06f81d20c4f7b256f708a79472529c389b274d1d54601394174d2",
    "refine_cdp_cr": "8eeb1cb8554df6c4bb7631f9ad54f5658430972873d4873d30618cc0c7eb1d52",
    "verify": "2e73af26b6c0c20501aa8d2231783b8bfffec2acaf0d742859a7a9f4d9e4a76c",
    "judge_q1": "7c43de591307780f0a869c4acdbc6de1dec3d513cc7b8a36aa30c30630977335",
    "judge_qn": "f53592bd20301fc02a651a8c8e3dd7b4ed7d45978d63c7d7c125fafc86053413",
    "judge_retrieval": "c4582875f415aec9ebf0bf285739e51c60ec1520df9c0f5f9197ebd79f41fb57",
    "judge_label": "e593234ed661a5d9d65dc4d4e57057b05ccdd151fa89111d7bc93c46478f1fd0",
}

_PROMPT_DIR = Path(__file__).parent / "prompts"


class PromptIntegrityError(Exception):
    """A template file is missing or does not match its pinned checksum."""


class PromptRenderError(ValueError):
    """Render was called with the wrong placeholder values for a template."""


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str

    @property
    def checksum(self) -> str:
        return _sha256(self.body.encode("utf-8"))

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(p for p in PLACEHOLDERS if p in self.body)

    def render(self, values: dict[str, str]) -> str:
        """Substitute exactly the template's placeholders; other braces untouched."""
        required = {p[1:-1] for p in self.placeholders}
        supplied = set(values)
        if supplied != required:
            raise PromptRenderError(
                f"{self.name}: expected values for {sorted(required)}, got {sorted(supplied)}"
            )
        rendered = self.body
        for key, value in values.items():
            rendered = rendered.replace("{" + key + "}", value)
        return rendered

    def messages(self, values: dict[str, str]) -> list[ChatMessage]:
        """Render and split into chat messages at the template's role markers."""
        return split_messages(self.render(values))


def split_messages(rendered: str) -> list[ChatMessage]:
    """Split rendered template text into system/user messages.

    Templates without a user marker are follow-up turns: the whole body
    becomes one user message. Leading text before the user marker becomes the
    system message whether or not the system marker is present.
    """
    if USER_MARKER not in rendered:
        return [ChatMessage(role="user", content=rendered.strip())]
    head, _, tail = rendered.partition(USER_MARKER)
    head = head.replace(SYSTEM_MARKER, "", 1).strip()
    messages = []
    if head:
        messages.append(ChatMessage(role="system", content=head))
    messages.append(ChatMessage(role="user", content=tail.strip()))
    return messages


@lru_cache(maxsize=1)
def load_templates() -> dict[str, PromptTemplate]:
    """Load all templates from package data, verifying pinned checksums."""
    registry: dict[str, PromptTemplate] = {}
    problems: list[str] = []
    for name, expected in EXPECTED_CHECKSUMS.items():
        path = _PROMPT_DIR / f"{name}.txt"
        if not path.is_file():
            problems.append(f"{name}: file missing")
            continue
        data = path.read_bytes()
        actual = _sha256(data)
        if actual != expected:
            problems.append(f"{name}: checksum {actual} != pinned {expected}")
            continue
        registry[name] = PromptTemplate(name=name, body=data.decode("utf-8"))
    if problems:
        raise PromptIntegrityError("; ".join(problems))
    return registry


def get_template(name: str) -> PromptTemplate:
    templates = load_templates()
    if name not in templates:
        raise KeyError(f"unknown template: {name!r}")
    return templates[name]


def combined_checksum(registry: dict[str, PromptTemplate] | None = None) -> str:
    """Stable digest over all template bodies, for the health endpoint."""
    registry = registry if registry is not None else load_templates()
    digest = hashlib.sha256()
    for name in sorted(registry):
        digest.update(name.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(registry[name].body.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def verify_integrity(registry: dict[str, PromptTemplate] | None = None) -> bool:
    """True when every in-memory template still matches its pinned checksum."""
    registry = registry if registry is not None else load_templates()
    if set(registry) != set(EXPECTED_CHECKSUMS):
        return False
    return all(t.checksum == EXPECTED_CHECKSUMS[t.name] for t in registry.values())
