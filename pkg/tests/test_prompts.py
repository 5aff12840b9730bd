"""Prompt template fidelity: pinned checksums, placeholder-only rendering, splitting."""

from __future__ import annotations

import hashlib
import shutil

import pytest

from claimscope import prompts
from claimscope.prompts import (
    EXPECTED_CHECKSUMS,
    PLACEHOLDERS,
    PromptIntegrityError,
    PromptRenderError,
    combined_checksum,
    get_template,
    load_templates,
    split_messages,
)

EXPECTED_PLACEHOLDERS = {
    "extract_base": {"{text}"},
    "extract_cdp": {"{text}"},
    "refine_followup": set(),
    "refine_cdp_cr": {"{claim}", "{text}"},
    "verify": {"{claim}", "{evidence}"},
    "judge_q1": {"{claim}", "{text}"},
    "judge_qn": {"{QUESTION}", "{claim}"},
    "judge_retrieval": {"{claim}", "{text}"},
    "judge_label": {"{SUPPORTED/REFUTED}", "{claim}", "{text}"},
}

SAMPLE_VALUES = {
    "text": "Some source paragraph.",
    "claim": "Water boils at 100 C.",
    "evidence": "An abstract about boiling points.",
    "QUESTION": "Is the claim grammatically correct?",
    "SUPPORTED/REFUTED": "SUPPORTED",
}


class TestChecksums:
    def test_every_file_matches_pinned_checksum(self):
        registry = load_templates()
        assert set(registry) == set(EXPECTED_CHECKSUMS)
        for name, template in registry.items():
            digest = hashlib.sha256(template.body.encode("utf-8")).hexdigest()
            assert digest == EXPECTED_CHECKSUMS[name], name

    def test_tampered_file_fails_load(self, tmp_path, monkeypatch):
        shutil.copytree(prompts._PROMPT_DIR, tmp_path / "prompts")
        target = tmp_path / "prompts" / "verify.txt"
        target.write_text(target.read_text() + "tamper")
        monkeypatch.setattr(prompts, "_PROMPT_DIR", tmp_path / "prompts")
        load_templates.cache_clear()
        try:
            with pytest.raises(PromptIntegrityError, match="verify"):
                load_templates()
        finally:
            load_templates.cache_clear()

    def test_missing_file_fails_load(self, tmp_path, monkeypatch):
        shutil.copytree(prompts._PROMPT_DIR, tmp_path / "prompts")
        (tmp_path / "prompts" / "judge_q1.txt").unlink()
        monkeypatch.setattr(prompts, "_PROMPT_DIR", tmp_path / "prompts")
        load_templates.cache_clear()
        try:
            with pytest.raises(PromptIntegrityError, match="missing"):
                load_templates()
        finally:
            load_templates.cache_clear()

    def test_verify_integrity_detects_in_memory_tampering(self):
        registry = dict(load_templates())
        assert prompts.verify_integrity(registry)
        bent = registry["verify"]
        registry["verify"] = type(bent)(name="verify", body=bent.body + "x")
        assert not prompts.verify_integrity(registry)

    def test_combined_checksum_is_stable_and_sensitive(self):
        registry = dict(load_templates())
        base = combined_checksum(registry)
        assert base == combined_checksum(dict(reversed(list(registry.items()))))
        bent = registry["verify"]
        registry["verify"] = type(bent)(name="verify", body=bent.body + "x")
        assert combined_checksum(registry) != base


class TestPlaceholders:
    def test_inventory_per_template(self):
        for name, expected in EXPECTED_PLACEHOLDERS.items():
            assert get_template(name).placeholders == frozenset(expected), name

    def test_templates_contain_literal_json_braces(self):
        # The braces below are template content, not placeholders; rendering
        # must leave them alone.
        assert '{"answer":' in get_template("judge_qn").body
        assert '{"original_claim":' in get_template("refine_cdp_cr").body


class TestRender:
    @pytest.mark.parametrize("name", sorted(EXPECTED_CHECKSUMS))
    def test_rendered_differs_only_at_placeholder_sites(self, name):
        template = get_template(name)
        values = {p[1:-1]: SAMPLE_VALUES[p[1:-1]] for p in template.placeholders}
        rendered = template.render(values)
        # Reconstruct by walking the template and substituting placeholders;
        # any other byte difference is a fidelity bug.
        expected = template.body
        for placeholder in template.placeholders:
            expected = expected.replace(placeholder, SAMPLE_VALUES[placeholder[1:-1]])
        assert rendered == expected
        # Splitting on placeholder tokens: all fixed segments must appear
        # verbatim and in order in the rendered text.
        segments = [template.body]
        for placeholder in template.placeholders:
            segments = [part for seg in segments for part in seg.split(placeholder)]
        cursor = 0
        for segment in segments:
            index = rendered.find(segment, cursor)
            assert index >= 0, f"fixed segment missing in rendered {name}"
            cursor = index + len(segment)

    def test_missing_value_rejected(self):
        with pytest.raises(PromptRenderError):
            get_template("verify").render({"claim": "only one"})

    def test_extra_value_rejected(self):
        with pytest.raises(PromptRenderError):
            get_template("extract_base").render({"text": "x", "claim": "y"})

    def test_unknown_template(self):
        with pytest.raises(KeyError):
            get_template("nonexistent")


class TestMessageSplitting:
    def test_standard_template_yields_system_and_user(self):
        messages = get_template("verify").messages(
            {"claim": "c", "evidence": "e"})
        assert [m.role for m in messages] == ["system", "user"]
        assert "CLAIM: c" in messages[1].content
        assert "EVIDENCE: e" in messages[1].content
        assert "<|" not in messages[0].content
        assert "<|" not in messages[1].content

    def test_followup_template_is_single_user_turn(self):
        messages = get_template("refine_followup").messages({})
        assert [m.role for m in messages] == ["user"]
        assert messages[0].content.startswith("Now, using the information")

    def test_template_without_system_marker_keeps_leading_text_as_system(self):
        messages = get_template("judge_qn").messages(
            {"QUESTION": "Is it concise?", "claim": "c"})
        assert [m.role for m in messages] == ["system", "user"]
        assert "Is it concise?" in messages[0].content
        assert messages[1].content == "CLAIM: c"

    def test_split_messages_plain_text(self):
        assert split_messages("  just text  ")[0].role == "user"

    def test_label_word_substitution(self):
        for word in ("SUPPORTED", "REFUTED"):
            messages = get_template("judge_label").messages(
                {"SUPPORTED/REFUTED": word, "claim": "c", "text": "t"})
            assert word in messages[0].content

    def test_placeholder_vocabulary_is_closed(self):
        for template in load_templates().values():
            for token in PLACEHOLDERS:
                if token in template.body:
                    assert token in template.placeholders
