"""HTTP client behavior against a stub transport: retries, backoff, error
mapping, and concurrency bounding."""

import threading

import pytest
import requests

from halldet.backends.base import GenerationMode, GenerationRequest
from halldet.backends.http import HttpBackend
from halldet.errors import BackendUnavailable, InputTooLong, MalformedResponse

OK_BODY = {
    "outputs": [{"text": "Entail", "logprob": -0.1}],
    "class_logprobs": {"entail": -0.1, "contradict": -2.3},
}


class StubResponse:
    def __init__(self, status_code, body=None, text=""):
        self.status_code = status_code
        self._body = body
        self.text = text

    def json(self):
        if self._body is None:
            raise ValueError("no JSON")
        return self._body


class StubSession:
    """Plays back a scripted sequence of responses/exceptions."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = 0
        self._lock = threading.Lock()
        self.in_flight = 0
        self.max_in_flight = 0

    def post(self, url, json=None, timeout=None):
        with self._lock:
            self.calls += 1
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            item = self.script.pop(0) if self.script else self.script_default()
            if isinstance(item, Exception):
                raise item
            return item
        finally:
            with self._lock:
                self.in_flight -= 1

    def get(self, url, timeout=None):
        return StubResponse(200, {"status": "ok"})

    def script_default(self):
        return StubResponse(200, OK_BODY)


REQUEST = GenerationRequest(input="x", mode=GenerationMode.CLASSIFY)


def backend_with(script, **kwargs):
    kwargs.setdefault("sleep", lambda _: None)
    return HttpBackend("http://test", session=StubSession(script), **kwargs)


class TestRetries:
    def test_retries_transport_failure_then_succeeds(self):
        session = StubSession([requests.exceptions.ConnectionError("boom")])
        backend = HttpBackend("http://test", session=session, sleep=lambda _: None)
        result = backend.generate(REQUEST)
        assert result.outputs[0].text == "Entail"
        assert session.calls == 2

    def test_retries_503_then_succeeds(self):
        session = StubSession([StubResponse(503, {"error": "busy"})])
        backend = HttpBackend("http://test", session=session, sleep=lambda _: None)
        assert backend.generate(REQUEST).outputs[0].text == "Entail"
        assert session.calls == 2

    def test_exhausted_retries_raise_backend_unavailable(self):
        session = StubSession([requests.exceptions.ConnectionError("boom")] * 5)
        backend = HttpBackend(
            "http://test", session=session, max_attempts=3, sleep=lambda _: None
        )
        with pytest.raises(BackendUnavailable):
            backend.generate(REQUEST)
        assert session.calls == 3

    def test_backoff_is_exponential(self):
        delays = []
        session = StubSession([requests.exceptions.ConnectionError("x")] * 3)
        backend = HttpBackend(
            "http://test",
            session=session,
            max_attempts=3,
            backoff_base=0.1,
            sleep=delays.append,
        )
        with pytest.raises(BackendUnavailable):
            backend.generate(REQUEST)
        assert delays == [0.1, 0.2]


class TestErrorMapping:
    def test_413_maps_to_input_too_long_without_retry(self):
        session = StubSession([StubResponse(413, {"error": "too long"})])
        backend = HttpBackend("http://test", session=session, sleep=lambda _: None)
        with pytest.raises(InputTooLong):
            backend.generate(REQUEST)
        assert session.calls == 1

    def test_400_maps_to_malformed(self):
        backend = backend_with([StubResponse(400, {"error": "bad"})])
        with pytest.raises(MalformedResponse):
            backend.generate(REQUEST)

    def test_non_json_body_is_malformed(self):
        backend = backend_with([StubResponse(200, None, text="<html>")])
        with pytest.raises(MalformedResponse):
            backend.generate(REQUEST)

    def test_missing_fields_are_malformed(self):
        backend = backend_with([StubResponse(200, {"outputs": [{"text": "x"}]})])
        with pytest.raises(MalformedResponse):
            backend.generate(REQUEST)

    def test_unexpected_status_is_malformed(self):
        backend = backend_with([StubResponse(418, {"error": "teapot"})])
        with pytest.raises(MalformedResponse):
            backend.generate(REQUEST)


class TestConcurrencyBound:
    def test_in_flight_requests_capped(self):
        import time
        from concurrent.futures import ThreadPoolExecutor

        class SlowSession(StubSession):
            def post(self, url, json=None, timeout=None):
                with self._lock:
                    self.in_flight += 1
                    self.max_in_flight = max(self.max_in_flight, self.in_flight)
                time.sleep(0.02)
                try:
                    return StubResponse(200, OK_BODY)
                finally:
                    with self._lock:
                        self.in_flight -= 1

        session = SlowSession([])
        backend = HttpBackend("http://test", session=session, max_concurrency=3)
        with ThreadPoolExecutor(max_workers=12) as pool:
            list(pool.map(lambda _: backend.generate(REQUEST), range(12)))
        assert session.max_in_flight <= 3

    def test_health_check(self):
        backend = backend_with([])
        assert backend.health() is True
