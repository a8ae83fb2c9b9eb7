"""OpenAI-compatible client: payload shape, auth, retries, error mapping."""

import json

import httpx
import pytest

from gesturelab.agents import BackendError, ChatMessage, ImagePayload, OpenAIBackend


def make_backend(handler, **kwargs):
    transport = httpx.MockTransport(handler)
    client = httpx.Client(transport=transport)
    return OpenAIBackend(retry_backoff=0.001, client=client, **kwargs)


def completion(text: str) -> httpx.Response:
    return httpx.Response(
        200, json={"choices": [{"message": {"role": "assistant", "content": text}}]}
    )


def test_complete_happy_path(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["payload"] = json.loads(request.content)
        return completion("hello there")

    backend = make_backend(handler, model="test-model", temperature=0.3)
    text = backend.complete(
        [ChatMessage("system", "be brief"), ChatMessage("user", "hi")]
    )
    assert text == "hello there"
    assert seen["url"].endswith("/chat/completions")
    assert seen["auth"] == "Bearer sk-test"
    assert seen["payload"]["model"] == "test-model"
    assert seen["payload"]["temperature"] == 0.3
    assert seen["payload"]["messages"][0] == {"role": "system", "content": "be brief"}


def test_image_encoded_as_data_url(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["payload"] = json.loads(request.content)
        return completion("ok")

    backend = make_backend(handler)
    backend.complete(
        [ChatMessage("user", "look", image=ImagePayload(b"pixels", "image/png"))]
    )
    content = seen["payload"]["messages"][0]["content"]
    assert content[0] == {"type": "text", "text": "look"}
    assert content[1]["image_url"]["url"].startswith("data:image/png;base64,")


def test_missing_api_key(monkeypatch):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    backend = make_backend(lambda request: completion("x"))
    with pytest.raises(BackendError, match="OPENAI_API_KEY"):
        backend.complete([ChatMessage("user", "hi")])


def test_retries_on_429_then_succeeds(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        if calls["n"] < 3:
            return httpx.Response(429, json={"error": {"message": "rate limited"}})
        return completion("finally")

    backend = make_backend(handler)
    assert backend.complete([ChatMessage("user", "hi")]) == "finally"
    assert calls["n"] == 3


def test_gives_up_after_transport_budget(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")

    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(503, text="unavailable")

    backend = make_backend(handler)
    backend.transport_retries = 2
    with pytest.raises(BackendError, match="503"):
        backend.complete([ChatMessage("user", "hi")])


def test_client_errors_do_not_retry(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        return httpx.Response(401, json={"error": {"message": "bad key"}})

    backend = make_backend(handler)
    with pytest.raises(BackendError, match="401"):
        backend.complete([ChatMessage("user", "hi")])
    assert calls["n"] == 1


def test_malformed_completion_body(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test")
    backend = make_backend(lambda request: httpx.Response(200, json={"choices": []}))
    with pytest.raises(BackendError, match="malformed"):
        backend.complete([ChatMessage("user", "hi")])
