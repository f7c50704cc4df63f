"""Provider implementations: a deterministic scripted mock and a live client.

The mock replays an ordered fixture list and records every call it serves,
so tests can assert on the exact rendered prompts and parameters. One script
item is consumed per provider call, retries included.
"""

from __future__ import annotations

import base64
import json
import os
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import httpx

from .errors import (
    ContentPolicyRejection,
    ProviderError,
    ProviderTimeout,
    ScriptExhausted,
)
from .gateway import GenerationParams, ProviderConfig


def _png_chunk(kind: bytes, data: bytes) -> bytes:
    return (
        len(data).to_bytes(4, "big")
        + kind
        + data
        + zlib.crc32(kind + data).to_bytes(4, "big")
    )


def placeholder_png(width: int = 1, height: int = 1) -> bytes:
    """A minimal valid grayscale PNG, used as the mock generation result."""
    header = width.to_bytes(4, "big") + height.to_bytes(4, "big") + b"\x08\x00\x00\x00\x00"
    raw = b"".join(b"\x00" + b"\x80" * width for _ in range(height))
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(raw))
        + _png_chunk(b"IEND", b"")
    )


@dataclass
class RecordedCall:
    kind: str  # "text" | "image"
    tag: str
    messages: list[dict] | None
    prompt: str | None
    params: GenerationParams | None


def _normalize_item(item: Any) -> dict:
    if isinstance(item, dict) and "kind" in item:
        return item
    if isinstance(item, str):
        return {"kind": "text", "content": item}
    if isinstance(item, bytes):
        return {"kind": "image", "png_base64": base64.b64encode(item).decode("ascii")}
    if isinstance(item, (list, dict)):
        return {"kind": "text", "content": json.dumps(item, ensure_ascii=False)}
    raise TypeError(f"unsupported script item: {type(item)!r}")


class MockProvider:
    """Replays scripted fixtures in order; fails loudly when they run out."""

    def __init__(self, script: Sequence[Any]) -> None:
        self._script = [_normalize_item(item) for item in script]
        self._cursor = 0
        self.recorded: list[RecordedCall] = []

    def _next(self) -> dict:
        if self._cursor >= len(self._script):
            raise ScriptExhausted(
                f"mock script exhausted after {len(self._script)} fixtures"
            )
        item = self._script[self._cursor]
        self._cursor += 1
        return item

    def remaining(self) -> int:
        return len(self._script) - self._cursor

    def _raise_scripted(self, item: dict) -> None:
        kind = item["kind"]
        message = item.get("message", kind)
        if kind == "provider_error":
            raise ProviderError(message)
        if kind == "timeout":
            raise ProviderTimeout(message)
        if kind == "refusal":
            raise ContentPolicyRejection(message)

    def complete(self, messages: list[dict], params: GenerationParams, tag: str) -> str:
        item = self._next()
        self.recorded.append(
            RecordedCall(kind="text", tag=tag, messages=messages, prompt=None, params=params)
        )
        if item["kind"] != "text":
            self._raise_scripted(item)
            raise ProviderError(f"script item of kind {item['kind']!r} for a text call")
        return item["content"]

    def generate_image(self, prompt: str, tag: str) -> bytes:
        item = self._next()
        self.recorded.append(
            RecordedCall(kind="image", tag=tag, messages=None, prompt=prompt, params=None)
        )
        if item["kind"] != "image":
            self._raise_scripted(item)
            raise ProviderError(f"script item of kind {item['kind']!r} for an image call")
        return base64.b64decode(item["png_base64"])


def load_script(path: str | Path) -> list[dict]:
    """Load a fixture script: a JSON file with a top-level ``fixtures`` array."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    fixtures = data["fixtures"] if isinstance(data, dict) else data
    return [_normalize_item(item) for item in fixtures]


class OpenAICompatProvider:
    """Thin client for an OpenAI-compatible HTTP API.

    The credential is read from the environment at call time and is never
    written to logs, snapshots, or error payloads.
    """

    def __init__(self, config: ProviderConfig) -> None:
        self._config = config

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        secret = os.environ.get(self._config.credential_env, "")
        if secret:
            headers["Authorization"] = f"Bearer {secret}"
        return headers

    def complete(self, messages: list[dict], params: GenerationParams, tag: str) -> str:
        body = {
            "model": self._config.text_model_id,
            "messages": messages,
            "temperature": params.temperature,
        }
        try:
            response = httpx.post(
                f"{self._config.base_url.rstrip('/')}/chat/completions",
                json=body,
                headers=self._headers(),
                timeout=params.timeout_ms / 1000,
            )
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"text generation timed out: {exc}") from None
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from None
        self._check(response)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from None

    def generate_image(self, prompt: str, tag: str) -> bytes:
        body = {
            "model": self._config.image_model_id,
            "prompt": prompt,
            "response_format": "b64_json",
        }
        try:
            response = httpx.post(
                f"{self._config.base_url.rstrip('/')}/images/generations",
                json=body,
                headers=self._headers(),
                timeout=120,
            )
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"image generation timed out: {exc}") from None
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from None
        self._check(response)
        try:
            return base64.b64decode(response.json()["data"][0]["b64_json"])
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from None

    @staticmethod
    def _check(response: httpx.Response) -> None:
        if response.is_success:
            return
        detail = ""
        code = ""
        try:
            error = response.json().get("error", {})
            detail = error.get("message", "")
            code = error.get("code", "") or error.get("type", "")
        except ValueError:
            detail = response.text[:200]
        if "content_policy" in code or "moderation" in code:
            raise ContentPolicyRejection(detail or "content policy rejection")
        raise ProviderError(f"provider returned {response.status_code}: {detail}")
