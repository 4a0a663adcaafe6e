"""Completion backends: the slot a fine-tuned model plugs into.

A backend maps one :class:`GenerationRequest` to at most ``candidate_count``
completion texts.  Three implementations ship here: a remote HTTP backend, a
scripted replay backend for tests and offline runs, and an oracle backend
that answers from deterministic inference instead of a model.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import BackendTransportError, ContractForgeError
from .inference import InferenceOptions, infer_contract
from .model import canonicalize
from .profiling import DataProfile
from .prompts import STAGE1_PREFIX


@dataclass
class GenerationRequest:
    prompt: str
    temperature: float = 0.0
    max_output_chars: int = 8000
    candidate_count: int = 1

    def __post_init__(self):
        if self.candidate_count < 1:
            raise ContractForgeError("candidate_count must be >= 1")
        if self.temperature < 0:
            raise ContractForgeError("temperature must be >= 0")


class CompletionBackend(ABC):
    """Interface every backend implements.

    ``complete`` may be called from several threads at once and must return
    at most ``request.candidate_count`` texts.
    """

    backend_id: str = "backend"

    @abstractmethod
    def complete(self, request: GenerationRequest) -> list[str]:
        raise NotImplementedError


class OracleBackend(CompletionBackend):
    """Answers every request from deterministic inference on a fixed profile.

    Stage-1 prompts get the column list; everything else gets the canonical
    text of the inferred contract.
    """

    backend_id = "oracle"

    def __init__(self, profile: DataProfile,
                 options: InferenceOptions | None = None):
        self._profile = profile
        self._options = options

    def complete(self, request: GenerationRequest) -> list[str]:
        if request.prompt.startswith(STAGE1_PREFIX):
            return [json.dumps(self._profile.column_names())]
        return [canonicalize(infer_contract(self._profile, self._options))]


class ScriptedBackend(CompletionBackend):
    """Replays canned completions from a fixture mapping.

    Keys are either the sha256 hex digest of the prompt or the 0-based call
    sequence index as a decimal string; hash keys win when both match.  An
    unmatched request yields no completions, which sends generation down the
    fallback path.
    """

    backend_id = "script"

    def __init__(self, script: dict[str, list[str]]):
        self._script = {k: list(v) for k, v in script.items()}
        self._calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path) -> "ScriptedBackend":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ContractForgeError("scripted backend fixture must be a JSON object")
        return cls(doc)

    @classmethod
    def from_completions(cls, completions: list[list[str]]) -> "ScriptedBackend":
        return cls({str(i): texts for i, texts in enumerate(completions)})

    @staticmethod
    def prompt_key(prompt: str) -> str:
        return hashlib.sha256(prompt.encode("utf-8")).hexdigest()

    def complete(self, request: GenerationRequest) -> list[str]:
        with self._lock:
            call_index = self._calls
            self._calls += 1
        texts = self._script.get(self.prompt_key(request.prompt))
        if texts is None:
            texts = self._script.get(str(call_index), [])
        return list(texts)[: request.candidate_count]


class HttpBackend(CompletionBackend):
    """Remote completion service speaking the wire contract:

    POST <url> with ``{"prompt", "temperature", "max_tokens", "n"}`` and a
    ``{"completions": [text, ...]}`` response.  Bearer auth comes from the
    environment variable named at construction, never from config literals.
    Transient failures are retried with exponential backoff; exhausting the
    retries raises :class:`BackendTransportError`.
    """

    def __init__(self, url: str, backend_id: str = "http", timeout: float = 30.0,
                 retries: int = 2, backoff: float = 1.0,
                 auth_env: str | None = None):
        self.backend_id = backend_id
        self._url = url
        self._timeout = timeout
        self._retries = max(0, retries)
        self._backoff = backoff
        self._auth_env = auth_env

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self._auth_env:
            import os

            token = os.environ.get(self._auth_env)
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, request: GenerationRequest) -> list[str]:
        body = {
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_output_chars,
            "n": request.candidate_count,
        }
        delay = self._backoff
        last_error = "no attempt made"
        for attempt in range(self._retries + 1):
            try:
                response = requests.post(self._url, json=body,
                                         headers=self._headers(),
                                         timeout=self._timeout)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code >= 500:
                    last_error = f"server error {response.status_code}"
                elif response.status_code >= 400:
                    raise BackendTransportError(
                        f"backend at {self._url} rejected the request: "
                        f"{response.status_code} {response.text[:200]}")
                else:
                    return self._parse_response(response)[: request.candidate_count]
            if attempt < self._retries:
                time.sleep(delay)
                delay *= 2
        raise BackendTransportError(
            f"backend at {self._url} unreachable after {self._retries + 1} attempts: {last_error}")

    def _parse_response(self, response) -> list[str]:
        try:
            doc = response.json()
        except ValueError as exc:
            raise BackendTransportError(f"backend returned non-JSON body: {exc}") from exc
        completions = doc.get("completions") if isinstance(doc, dict) else None
        if not isinstance(completions, list) or not all(isinstance(t, str) for t in completions):
            raise BackendTransportError('backend response lacks a "completions" list of texts')
        return completions
