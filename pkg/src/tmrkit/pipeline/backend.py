"""Generation backends: a scripted mock and a remote HTTP endpoint.

Both expose ``generate(prompt) -> str``.  The mock replays canned replies
keyed by request digest, which keeps whole-pipeline tests deterministic;
the HTTP backend posts the prompt parts with a base64 image and never puts
its credential anywhere loggable.
"""

from __future__ import annotations

import base64
import json
import os
from pathlib import Path

import requests

from tmrkit.pipeline.prompts import PromptSpec

API_KEY_ENV = "MODEL_API_KEY"


class BackendError(Exception):
    """Base class for generation failures."""


class BackendTimeout(BackendError):
    """No reply within the time budget, retries included."""


class BackendRefusal(BackendError):
    """The endpoint rejected the request outright."""


class MockBackend:
    """Replies from a transcript mapping request digest to canned text."""

    def __init__(
        self,
        transcript: dict[str, str] | None = None,
        default: str | None = None,
    ):
        self.transcript = dict(transcript or {})
        self.default = default
        self.calls: list[str] = []

    @classmethod
    def from_file(cls, path: str | Path, default: str | None = None) -> "MockBackend":
        return cls(json.loads(Path(path).read_text("utf-8")), default)

    def generate(self, prompt: PromptSpec) -> str:
        digest = prompt.digest()
        self.calls.append(digest)
        reply = self.transcript.get(digest, self.default)
        if reply is None:
            raise BackendRefusal(f"no scripted reply for digest {digest[:12]}")
        return reply


class HttpBackend:
    """Remote generation endpoint speaking a small JSON protocol.

    Request: ``{model, parts, image_b64, temperature, max_tokens}``; reply:
    JSON with the generated text under ``text``.  The credential comes from
    the environment and is sent only as a bearer header.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        temperature: float = 0.0,
        max_tokens: int = 1024,
        timeout_s: float = 60.0,
        max_retries: int = 2,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self._api_key = api_key or os.environ.get(API_KEY_ENV, "")
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self._session = session or requests.Session()

    def __repr__(self) -> str:
        return f"HttpBackend(endpoint={self.endpoint!r}, model={self.model!r})"

    def _payload(self, prompt: PromptSpec) -> dict:
        image_path = Path(prompt.image)
        image_b64 = (
            base64.b64encode(image_path.read_bytes()).decode("ascii")
            if image_path.exists()
            else ""
        )
        return {
            "model": self.model,
            "parts": prompt.parts(),
            "image_b64": image_b64,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }

    def generate(self, prompt: PromptSpec) -> str:
        payload = self._payload(prompt)
        headers = {"Authorization": f"Bearer {self._api_key}"}
        attempts = self.max_retries + 1
        last_error = "no attempt made"
        for _ in range(attempts):
            try:
                response = self._session.post(
                    self.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=self.timeout_s,
                )
            except requests.Timeout as exc:
                last_error = str(exc)
                continue
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if 400 <= response.status_code < 500:
                raise BackendRefusal(f"endpoint returned HTTP {response.status_code}")
            if response.status_code != 200:
                last_error = f"HTTP {response.status_code}"
                continue
            body = response.json()
            if "text" not in body:
                raise BackendRefusal("reply carries no text field")
            return body["text"]
        raise BackendTimeout(f"no reply after {attempts} attempts: {last_error}")


def extract_candidate_tmr(reply: str) -> str | None:
    """Cut the first balanced parenthesized block out of a raw reply.

    Code fence lines are dropped, prose before the first ``(`` is skipped,
    and quotes (with backslash escapes) shield parentheses inside literals.
    Returns None when no balanced block exists.
    """
    body = "\n".join(
        line for line in reply.splitlines() if not line.lstrip().startswith("```")
    )
    start = body.find("(")
    if start < 0:
        return None
    depth = 0
    in_string = False
    index = start
    while index < len(body):
        ch = body[index]
        if in_string:
            if ch == "\\":
                index += 1
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return body[start : index + 1]
        index += 1
    return None
