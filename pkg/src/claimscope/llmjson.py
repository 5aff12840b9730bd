"""Tolerant extraction of JSON objects from LLM output."""

from __future__ import annotations

import json


def _first_balanced_span(text: str) -> str | None:
    """Return the first balanced {...} span, honoring strings and escapes."""
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start:i + 1]
    return None


def first_json_object(text: str) -> dict | None:
    """Parse text as a JSON object; fall back to the first balanced span.

    Returns None when no object can be recovered; never raises.
    """
    for candidate in (text, _first_balanced_span(text)):
        if candidate is None:
            continue
        try:
            parsed = json.loads(candidate)
        except (json.JSONDecodeError, ValueError):
            continue
        if isinstance(parsed, dict):
            return parsed
    return None
