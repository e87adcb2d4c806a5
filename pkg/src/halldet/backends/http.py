"""HTTP client for the generation wire protocol.

Requests are idempotent (seeded generation), so transport failures and 503
responses are retried with bounded exponential backoff. In-flight requests
are capped by a semaphore so batch callers cannot stampede a backend.
"""

from __future__ import annotations

import json
import threading
import time
from typing import Callable

import requests

from ..errors import BackendUnavailable, InputTooLong, MalformedResponse
from .base import GenerationRequest, GenerationResult, request_to_wire, result_from_wire

_RETRYABLE = (requests.exceptions.ConnectionError, requests.exceptions.Timeout)


class HttpBackend:
    """Client for any server speaking the /v1/generate protocol."""

    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff_base: float = 0.25,
        max_concurrency: int = 8,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.max_concurrency = max_concurrency
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep
        self._slots = threading.Semaphore(max_concurrency)

    def generate(self, request: GenerationRequest) -> GenerationResult:
        body = request_to_wire(request)
        last_failure = "unknown failure"
        with self._slots:
            for attempt in range(1, self.max_attempts + 1):
                try:
                    response = self._session.post(
                        f"{self.base_url}/v1/generate", json=body, timeout=self.timeout
                    )
                except _RETRYABLE as exc:
                    last_failure = f"transport failure: {exc}"
                else:
                    if response.status_code == 503:
                        last_failure = "backend returned 503"
                    else:
                        return self._handle(response)
                if attempt < self.max_attempts:
                    self._sleep(self.backoff_base * (2 ** (attempt - 1)))
        raise BackendUnavailable(f"{last_failure} after {self.max_attempts} attempts")

    def _handle(self, response: requests.Response) -> GenerationResult:
        if response.status_code == 413:
            raise InputTooLong(_error_detail(response) or "backend refused over-long input")
        if response.status_code == 400:
            raise MalformedResponse(
                f"backend rejected request as malformed: {_error_detail(response)}"
            )
        if response.status_code != 200:
            raise MalformedResponse(f"unexpected status {response.status_code}")
        try:
            payload = response.json()
        except (ValueError, json.JSONDecodeError) as exc:
            raise MalformedResponse(f"response is not valid JSON: {exc}") from exc
        return result_from_wire(payload)

    def health(self) -> bool:
        """True when GET /v1/health answers {"status": "ok"}."""
        try:
            response = self._session.get(f"{self.base_url}/v1/health", timeout=self.timeout)
            return response.status_code == 200 and response.json().get("status") == "ok"
        except (requests.exceptions.RequestException, ValueError):
            return False


def _error_detail(response: requests.Response) -> str:
    try:
        return str(response.json().get("error", ""))
    except ValueError:
        return response.text[:200]
