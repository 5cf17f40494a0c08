"""Text-to-text and vision-to-text backends.

Wire protocol for real backends (HTTP POST, JSON both ways)::

    request:  {"prompt": str, "image_base64": str | null, "temperature": float,
               "max_tokens": int, "seed": int}
    response: {"texts": [str, ...]}

The bearer token, when needed, is read from the environment variable named by
``BackendConfig.api_key_env`` and is never stored in config files.
"""

from __future__ import annotations

import base64
import logging
import os
import re
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import requests

from ..errors import BackendTimeout, BackendUnavailable, EmptyCompletion, ImageUnreadable
from ..knowledge import AssetMetadata
from . import mock

log = logging.getLogger(__name__)


class BackendKind(str, Enum):
    TEXT = "Text"
    VISION = "Vision"
    MOCK = "Mock"


@dataclass(frozen=True)
class BackendConfig:
    backend_id: str
    kind: BackendKind = BackendKind.MOCK
    endpoint: str | None = None
    timeout: float = 30.0
    max_retries: int = 2
    temperature: float = 0.3
    max_tokens: int = 4096
    retry_backoff: float = 0.5
    api_key_env: str | None = None
    # mock only
    mock_mode: str = "grammar"
    wrap_rate: float = 0.0

    def __post_init__(self):
        if self.kind != BackendKind.MOCK and not self.endpoint:
            raise ValueError(f"backend {self.backend_id!r}: real backends require an endpoint")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.mock_mode not in ("grammar", "echo"):
            raise ValueError(f"unknown mock_mode {self.mock_mode!r}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BackendConfig":
        data = dict(data)
        data["kind"] = BackendKind(data.get("kind", "Mock"))
        sampling = data.pop("sampling", None) or {}
        data.setdefault("temperature", sampling.get("temperature", 0.3))
        data.setdefault("max_tokens", sampling.get("max_tokens", 4096))
        return cls(**data)


@dataclass(frozen=True)
class Completion:
    texts: tuple[str, ...]
    backend_id: str
    latency: float


@dataclass(frozen=True)
class ImageRef:
    """Locator for the image shown to a vision backend.

    Real backends read ``path``; the mock synthesizes from ``asset`` metadata.
    """

    path: str | None = None
    asset: AssetMetadata | None = None


def _parse_response(payload: Any) -> list[str]:
    if not isinstance(payload, dict) or not isinstance(payload.get("texts"), list):
        raise BackendUnavailable("malformed backend response: expected {'texts': [...]}")
    return [str(t) for t in payload["texts"]]


class MockBackend:
    def __init__(self, config: BackendConfig):
        self.config = config

    def request(self, prompt: str, image: ImageRef | None, seed: int) -> list[str]:
        if image is None:
            texts = mock.mock_text(prompt, seed, mode=self.config.mock_mode, wrap_rate=self.config.wrap_rate)
        else:
            if image.asset is None:
                raise ImageUnreadable("mock vision backend needs asset metadata attached to the image ref")
            texts = mock.mock_vision(prompt, image.asset, seed, mode=self.config.mock_mode)
        return _parse_response({"texts": texts})


class HttpBackend:
    def __init__(self, config: BackendConfig, session: requests.Session | None = None):
        self.config = config
        self.session = session or requests.Session()

    def request(self, prompt: str, image: ImageRef | None, seed: int) -> list[str]:
        body: dict[str, Any] = {
            "prompt": prompt,
            "image_base64": None,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
            "seed": seed,
        }
        if image is not None:
            body["image_base64"] = _read_image(image)
        headers = {}
        if self.config.api_key_env and os.environ.get(self.config.api_key_env):
            headers["Authorization"] = f"Bearer {os.environ[self.config.api_key_env]}"
        try:
            resp = self.session.post(self.config.endpoint, json=body, headers=headers, timeout=self.config.timeout)
        except requests.Timeout as exc:
            raise BackendTimeout(f"{self.config.backend_id}: {exc}") from None
        except requests.RequestException as exc:
            raise BackendUnavailable(f"{self.config.backend_id}: {exc}") from None
        if resp.status_code >= 400:
            raise BackendUnavailable(f"{self.config.backend_id}: HTTP {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError:
            raise BackendUnavailable(f"{self.config.backend_id}: response is not JSON") from None
        return _parse_response(payload)


def _read_image(image: ImageRef) -> str:
    if not image.path:
        raise ImageUnreadable("image ref has no path")
    try:
        data = Path(image.path).read_bytes()
    except OSError as exc:
        raise ImageUnreadable(f"cannot read image {image.path!r}: {exc.strerror}") from None
    return base64.b64encode(data).decode("ascii")


def make_backend(config: BackendConfig):
    if config.kind == BackendKind.MOCK:
        return MockBackend(config)
    return HttpBackend(config)


def _call(backend, prompt: str, image: ImageRef | None, seed: int) -> tuple[list[str], float]:
    cfg = backend.config
    start = time.perf_counter()
    for attempt in range(cfg.max_retries + 1):
        try:
            texts = backend.request(prompt, image, seed)
            break
        except (BackendUnavailable, BackendTimeout) as exc:
            if attempt == cfg.max_retries:
                raise
            log.warning("backend %s attempt %d failed: %s", cfg.backend_id, attempt + 1, exc)
            time.sleep(cfg.retry_backoff * (2**attempt))
    texts = [t for t in texts if t.strip()]
    if not texts:
        raise EmptyCompletion(f"{cfg.backend_id} returned no text")
    return texts, time.perf_counter() - start


def complete_text(backend, prompt: str, *, seed: int = 0) -> Completion:
    if backend.config.kind not in (BackendKind.TEXT, BackendKind.MOCK):
        raise ValueError(f"backend {backend.config.backend_id!r} cannot serve text completions")
    texts, latency = _call(backend, prompt, None, seed)
    return Completion(tuple(texts), backend.config.backend_id, latency)


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def requested_count(prompt: str) -> int | None:
    m = re.search(r"\bgenerate (\d+)\b", prompt, flags=re.IGNORECASE)
    return int(m.group(1)) if m else None


def complete_vision(backend, image_ref: ImageRef, prompt: str, *, seed: int = 0) -> Completion:
    if backend.config.kind not in (BackendKind.VISION, BackendKind.MOCK):
        raise ValueError(f"backend {backend.config.backend_id!r} cannot serve vision completions")
    texts, latency = _call(backend, prompt, image_ref, seed)
    want = requested_count(prompt)
    if want and len(texts) != want:
        split = [s.strip() for t in texts for s in _SENTENCE_END.split(t) if s.strip()]
        log.warning(
            "backend %s returned %d texts, expected %d; splitting/truncating",
            backend.config.backend_id, len(texts), want,
        )
        texts = split[:want] if split else texts[:want]
    return Completion(tuple(texts), backend.config.backend_id, latency)
