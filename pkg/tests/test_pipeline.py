"""End-to-end pipeline behavior on scripted gateways: counts, suppression, determinism."""

from __future__ import annotations

import json

import pytest

from claimscope.corpus import CorpusIndex, IndexConfig
from claimscope.extraction import ClaimExtractor
from claimscope.gateway import GatewayError, ScriptedGateway
from claimscope.pipeline import AnalysisPipeline, presentation_view
from claimscope.verification import ClaimVerifier

from conftest import make_doc, scripted_verdict, verdict_text


def build_pipeline(index, script, k=2):
    gateway = ScriptedGateway(script)
    extractor = ClaimExtractor(gateway)
    verifier = ClaimVerifier(gateway)
    return AnalysisPipeline(index, extractor, verifier, retrieval_k=k), gateway


def refinement(refined: str) -> str:
    return json.dumps({"original_claim": "x", "refined_claim": refined,
                       "rationale": "tightened"})


def standard_script(two_doc_index):
    """1 candidate -> 1 refinement -> 2 verifications (SUPPORT then NEI)."""
    return [
        "-- cold exposure claim\n",
        refinement("Cold exposure increases brown fat activity."),
        scripted_verdict("SUPPORT", ["Cold exposure increases brown fat activity."],
                         alternatives=[("SUPPORT", -0.1), ("CONTRADICT", -2.3),
                                       ("NEI", -4.6)]),
        verdict_text("NEI"),
    ]


class TestAnalyze:
    def test_call_count_is_one_plus_n_plus_n_times_k(self, two_doc_index):
        pipeline, gateway = build_pipeline(two_doc_index,
                                           standard_script(two_doc_index), k=2)
        pipeline.analyze("Cold makes brown fat work harder.", k=2)
        assert gateway.calls_made == 1 + 1 + 1 * 2

    def test_report_contents(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        assert len(report.claims) == 1
        analysis = report.claims[0]
        assert analysis.claim.text == "Cold exposure increases brown fat activity."
        assert analysis.claim.original_text == "cold exposure claim"
        assert len(analysis.retrieval) == 2
        assert [v.doc_id for v in analysis.verdicts] == \
            [h.doc_id for h in analysis.retrieval]
        assert report.suppressed_nei_count == 1
        assert report.retrieval_k == 2
        labels = [v.label for v in analysis.verdicts]
        assert sorted(labels) == ["NEI", "SUPPORT"]
        assert set(report.documents) == {h.doc_id for h in analysis.retrieval}

    def test_verdicts_ordered_by_retrieval_rank(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        analysis = report.claims[0]
        assert [h.rank for h in analysis.retrieval] == [1, 2]

    def test_no_orphan_evidence(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        for analysis in report.claims:
            hit_ids = {h.doc_id for h in analysis.retrieval}
            for verdict in analysis.verdicts:
                assert verdict.doc_id in hit_ids

    def test_gateway_failure_on_pair_becomes_flagged_nei(self, two_doc_index):
        class FlakyVerifier(ClaimVerifier):
            def verify(self, claim_id, claim_text, document):
                if document.doc_id == "d2":
                    raise GatewayError("boom")
                return super().verify(claim_id, claim_text, document)

        gateway = ScriptedGateway([
            "-- cold exposure claim\n",
            refinement("Cold exposure increases brown fat activity."),
            verdict_text("SUPPORT", ["Cold exposure increases brown fat activity."]),
        ])
        pipeline = AnalysisPipeline(two_doc_index, ClaimExtractor(gateway),
                                    FlakyVerifier(gateway), retrieval_k=2)
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        by_doc = {v.doc_id: v for v in report.claims[0].verdicts}
        assert by_doc["d1"].label == "SUPPORT"
        assert by_doc["d2"].label == "NEI"
        assert by_doc["d2"].flags == ("gateway-error",)
        assert "gateway-error" in report.flags

    def test_extraction_gateway_failure_propagates(self, two_doc_index):
        class DeadGateway:
            max_inflight = 1

            def complete(self, request):
                raise GatewayError("down")

        gateway = DeadGateway()
        pipeline = AnalysisPipeline(two_doc_index, ClaimExtractor(gateway),
                                    ClaimVerifier(gateway), retrieval_k=2)
        with pytest.raises(GatewayError):
            pipeline.analyze("some text")

    @pytest.mark.parametrize("text,k", [
        ("", 2), ("x" * 10_001, 2), ("fine", 0), ("fine", 21),
    ])
    def test_input_validation(self, two_doc_index, text, k):
        pipeline, _ = build_pipeline(two_doc_index, ["unused"])
        with pytest.raises(ValueError):
            pipeline.analyze(text, k=k)

    def test_ten_thousand_chars_accepted(self, two_doc_index):
        script = ["no claims found"]
        pipeline, _ = build_pipeline(two_doc_index, script)
        report = pipeline.analyze("y" * 10_000, k=2)
        assert report.claims == ()

    def test_timings_present(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        assert set(report.timings_ms) == {"extract_ms", "retrieve_ms",
                                          "verify_ms", "total_ms"}
        assert all(v >= 0 for v in report.timings_ms.values())

    def test_determinism_excluding_timings(self, two_doc_index):
        reports = []
        for _ in range(2):
            pipeline, _ = build_pipeline(two_doc_index,
                                         standard_script(two_doc_index))
            reports.append(pipeline.analyze("Cold makes brown fat work harder.", k=2))
        dicts = [r.to_dict() for r in reports]
        for d in dicts:
            d.pop("timings_ms")
        assert json.dumps(dicts[0], sort_keys=True) == json.dumps(dicts[1], sort_keys=True)


class TestPresentationView:
    def test_nei_suppressed_and_labels_mapped(self, two_doc_index):
        script = [
            "-- cold exposure claim\n",
            refinement("Cold exposure increases brown fat activity."),
            verdict_text("SUPPORT", ["Cold exposure increases brown fat activity."]),
            verdict_text("CONTRADICT", ["We found no link between cold showers and metabolism."]),
        ]
        pipeline, _ = build_pipeline(two_doc_index, script)
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        view = presentation_view(report)
        labels = [v["label"] for v in view["claims"][0]["verdicts"]]
        assert sorted(labels) == ["REFUTE", "SUPPORT"]
        dumped = json.dumps(view)
        assert "NEI" not in dumped
        assert "CONTRADICT" not in dumped

    def test_conflicting_verdicts_preserved_with_pub_dates(self, two_doc_index):
        script = [
            "-- cold exposure claim\n",
            refinement("Cold exposure increases brown fat activity."),
            verdict_text("SUPPORT", ["Cold exposure increases brown fat activity."]),
            verdict_text("CONTRADICT", ["We found no link between cold showers and metabolism."]),
        ]
        pipeline, _ = build_pipeline(two_doc_index, script)
        view = presentation_view(pipeline.analyze("Cold makes brown fat work harder.", k=2))
        verdicts = view["claims"][0]["verdicts"]
        assert len(verdicts) == 2
        dates = {v["doc_id"]: v["pub_date"] for v in verdicts}
        assert dates == {"d1": "2021-03-01", "d2": "2019-07-15"}

    def test_confidence_percentage_one_decimal(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        view = presentation_view(pipeline.analyze("Cold makes brown fat work harder.", k=2))
        verdict = view["claims"][0]["verdicts"][0]
        assert verdict["confidence_pct"] == 89.1  # 0.8913... as a percentage

    def test_abstract_and_doi_included_for_ui(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        view = presentation_view(pipeline.analyze("Cold makes brown fat work harder.", k=2))
        verdict = view["claims"][0]["verdicts"][0]
        assert verdict["doi"] == "10.1000/d1"
        assert verdict["abstract"].startswith("Cold exposure")
        spans = verdict["highlight_spans"]
        assert spans and all(0 <= s < e <= len(verdict["abstract"]) for s, e in spans)

    def test_idempotent_and_pure(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        first = presentation_view(report)
        second = presentation_view(report)
        assert first == second
        assert report.suppressed_nei_count == 1  # untouched

    def test_suppressed_count_matches_hidden_verdicts(self, two_doc_index):
        pipeline, _ = build_pipeline(two_doc_index, standard_script(two_doc_index))
        report = pipeline.analyze("Cold makes brown fat work harder.", k=2)
        view = presentation_view(report)
        total_internal = sum(len(ca.verdicts) for ca in report.claims)
        total_shown = sum(len(c["verdicts"]) for c in view["claims"])
        assert view["suppressed_nei_count"] == total_internal - total_shown
