"""HTTP client for chat-completions-style multimodal endpoints.

Speaks the common wire format: role-tagged messages, inline base64 image
parts, a temperature field. Transient failures (429, 5xx, connection
errors) are retried with exponential backoff up to ``max_retries``; each
terminal failure maps to a distinct typed error so callers can react.
"""

from __future__ import annotations

import logging
import threading
import time

import httpx

from stylefuse.errors import (
    AuthFailure,
    EndpointUnavailable,
    RateLimited,
    RequestTimeout,
)
from stylefuse.reasoning.prompt import PromptBundle
from stylefuse.reasoning.records import MllmConfig

logger = logging.getLogger("stylefuse.reasoning")

_BACKOFF_BASE_S = 0.5


class _TokenBucket:
    """Simple thread-safe token bucket; rate 0 disables it."""

    def __init__(self, rate_per_s: float):
        self.rate = rate_per_s
        self.capacity = max(rate_per_s, 1.0)
        self.tokens = self.capacity
        self.updated = time.monotonic()
        self.lock = threading.Lock()

    def acquire(self) -> None:
        if self.rate <= 0:
            return
        while True:
            with self.lock:
                now = time.monotonic()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            time.sleep(wait)


def messages_for(bundle: PromptBundle) -> list[dict]:
    """Wire-format messages for a prompt bundle (images inline as data URLs)."""
    user_parts: list[dict] = [{"type": "text", "text": bundle.user_text}]
    for image in bundle.images:
        user_parts.append(
            {
                "type": "image_url",
                "image_url": {"url": image.data_url(), "detail": "auto"},
                "label": image.label,
            }
        )
    return [
        {"role": "system", "content": bundle.system_text},
        {"role": "user", "content": user_parts},
    ]


class MllmClient:
    """Bounded-concurrency, rate-limited client for one endpoint."""

    def __init__(self, config: MllmConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._semaphore = threading.Semaphore(max(config.max_in_flight, 1))
        self._bucket = _TokenBucket(config.requests_per_second)
        self._client = httpx.Client(
            timeout=config.timeout_s,
            transport=transport,
        )
        self.last_attempts = 0

    def close(self) -> None:
        self._client.close()

    def invoke(self, bundle: PromptBundle) -> str:
        """POST the prompt; return the completion text verbatim."""
        if not self.config.endpoint:
            raise EndpointUnavailable("no reasoning endpoint configured")
        body = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": messages_for(bundle),
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            self.last_attempts = attempt + 1
            if attempt > 0:
                time.sleep(_BACKOFF_BASE_S * (2 ** (attempt - 1)))
            self._bucket.acquire()
            with self._semaphore:
                try:
                    response = self._client.post(
                        self.config.endpoint, json=body, headers=headers
                    )
                except httpx.TimeoutException as exc:
                    last_error = RequestTimeout(f"reasoning endpoint timed out: {exc}")
                    continue
                except httpx.HTTPError as exc:
                    last_error = EndpointUnavailable(f"reasoning endpoint unreachable: {exc}")
                    continue

            if response.status_code in (401, 403):
                raise AuthFailure(f"endpoint rejected credentials ({response.status_code})")
            if response.status_code == 429:
                last_error = RateLimited("endpoint rate limit (429)")
                logger.debug("429 from endpoint, attempt %d/%d", attempt + 1, attempts)
                continue
            if response.status_code >= 500:
                last_error = EndpointUnavailable(f"endpoint error {response.status_code}")
                continue
            if response.status_code != 200:
                raise EndpointUnavailable(
                    f"unexpected status {response.status_code}: {response.text[:200]}"
                )
            payload = response.json()
            try:
                return payload["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise EndpointUnavailable(f"malformed completion payload: {exc}") from exc

        assert last_error is not None
        raise last_error
