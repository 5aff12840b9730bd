"""Gateway behavior: request shape, retries with backoff, scripted replay."""

from __future__ import annotations

import json

import httpx
import pytest

from claimscope.gateway import (
    ChatMessage,
    CompletionRequest,
    GatewayError,
    HttpGateway,
    ScriptedGateway,
    ScriptExhaustedError,
    TokenInfo,
    mock_from_script,
    script_entry_from_record,
    scripted_gateway_from_jsonl,
)


def request_of(text: str = "hi") -> CompletionRequest:
    return CompletionRequest(messages=(ChatMessage(role="user", content=text),))


def ok_payload(content: str = "fine", logprobs: dict | None = None) -> dict:
    choice: dict = {"message": {"content": content}}
    if logprobs is not None:
        choice["logprobs"] = logprobs
    return {"model": "m", "choices": [choice]}


def gateway_with(handler, **kwargs) -> HttpGateway:
    transport = httpx.MockTransport(handler)
    client = httpx.Client(transport=transport)
    kwargs.setdefault("sleep", lambda s: None)
    return HttpGateway("http://llm.test/v1", model="m", client=client, **kwargs)


class TestChatMessage:
    def test_system_and_user_require_content(self):
        with pytest.raises(ValueError):
            ChatMessage(role="user", content="")
        with pytest.raises(ValueError):
            ChatMessage(role="system", content="")
        ChatMessage(role="assistant", content="")  # assistant may be empty

    def test_unknown_role(self):
        with pytest.raises(ValueError):
            ChatMessage(role="tool", content="x")

    def test_request_needs_messages(self):
        with pytest.raises(ValueError):
            CompletionRequest(messages=())


class TestHttpGateway:
    def test_posts_expected_payload(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["url"] = str(request.url)
            seen["body"] = json.loads(request.content)
            return httpx.Response(200, json=ok_payload())

        gw = gateway_with(handler)
        response = gw.complete(CompletionRequest(
            messages=(ChatMessage(role="system", content="s"),
                      ChatMessage(role="user", content="u")),
            logprobs=True, top_logprobs=7))
        assert response.text == "fine"
        assert seen["url"] == "http://llm.test/v1/chat/completions"
        assert seen["body"]["model"] == "m"
        assert seen["body"]["messages"] == [
            {"role": "system", "content": "s"}, {"role": "user", "content": "u"}]
        assert seen["body"]["temperature"] == 0.0
        assert seen["body"]["logprobs"] is True
        assert seen["body"]["top_logprobs"] == 7

    def test_logprobs_not_requested_by_default(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["body"] = json.loads(request.content)
            return httpx.Response(200, json=ok_payload())

        gateway_with(handler).complete(request_of())
        assert "logprobs" not in seen["body"]

    def test_retry_cap_two_means_three_attempts(self):
        calls = {"n": 0}
        delays: list[float] = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            return httpx.Response(500)

        transport = httpx.MockTransport(handler)
        gw = HttpGateway("http://down.test", model="m", retries=2,
                         client=httpx.Client(transport=transport),
                         sleep=delays.append)
        with pytest.raises(GatewayError, match="3 attempts"):
            gw.complete(request_of())
        assert calls["n"] == 3
        assert delays == [0.25, 1.0]

    def test_recovers_after_transient_failure(self):
        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            if calls["n"] < 3:
                return httpx.Response(503)
            return httpx.Response(200, json=ok_payload("recovered"))

        assert gateway_with(handler, retries=2).complete(request_of()).text == "recovered"
        assert calls["n"] == 3

    def test_client_errors_do_not_retry(self):
        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            return httpx.Response(400, text="bad request")

        with pytest.raises(GatewayError, match="HTTP 400"):
            gateway_with(handler, retries=2).complete(request_of())
        assert calls["n"] == 1

    def test_transport_error_retries(self):
        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            raise httpx.ConnectError("refused")

        with pytest.raises(GatewayError, match="3 attempts"):
            gateway_with(handler, retries=2).complete(request_of())
        assert calls["n"] == 3

    def test_malformed_payload_is_an_error(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json={"nonsense": True})

        with pytest.raises(GatewayError, match="malformed"):
            gateway_with(handler).complete(request_of())

    def test_alternatives_sorted_by_logprob_desc(self):
        logprobs = {"content": [{
            "token": "SUPPORT", "logprob": -0.1,
            "top_logprobs": [
                {"token": "NEI", "logprob": -4.6},
                {"token": "SUPPORT", "logprob": -0.1},
                {"token": "CONTRADICT", "logprob": -2.3},
            ],
        }]}

        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json=ok_payload("SUPPORT", logprobs))

        response = gateway_with(handler).complete(request_of())
        alts = response.tokens[0].alternatives
        assert [a.token for a in alts] == ["SUPPORT", "CONTRADICT", "NEI"]
        assert [a.logprob for a in alts] == sorted(
            (a.logprob for a in alts), reverse=True)


class TestScriptedGateway:
    def test_plays_entries_in_order(self):
        gw = mock_from_script(["one", "two"])
        assert gw.complete(request_of()).text == "one"
        assert gw.complete(request_of()).text == "two"
        assert gw.calls_made == 2

    def test_exhausted_script_is_an_error(self):
        gw = mock_from_script(["only"])
        gw.complete(request_of())
        with pytest.raises(ScriptExhaustedError):
            gw.complete(request_of())

    def test_empty_script_rejected_at_construction(self):
        with pytest.raises(ValueError):
            mock_from_script([])

    def test_records_requests_for_assertions(self):
        gw = ScriptedGateway(["a"])
        gw.complete(request_of("what was asked"))
        assert gw.requests[0].messages[0].content == "what was asked"

    def test_serial_by_default(self):
        assert ScriptedGateway(["a"]).max_inflight == 1

    def test_from_jsonl(self, tmp_path):
        path = tmp_path / "script.jsonl"
        path.write_text(
            json.dumps({"text": "hello"}) + "\n" +
            json.dumps({"text": "with tokens", "tokens": [
                {"token": "with", "logprob": -0.5,
                 "alternatives": [["w", -3.0], ["with", -0.5]]}]}) + "\n")
        gw = scripted_gateway_from_jsonl(path)
        first = gw.complete(request_of())
        second = gw.complete(request_of())
        assert first.text == "hello" and first.tokens is None
        assert second.tokens[0].alternatives[0].token == "with"

    def test_bad_script_record(self):
        with pytest.raises(ValueError):
            script_entry_from_record({"no_text": 1})
