"""Model backends: contract types, deterministic mock, HTTP client/server,
and the conformance suite that certifies interchangeability."""

from .base import (
    Backend,
    GenerationMode,
    GenerationRequest,
    GenerationResult,
    Normalization,
    ScoredOutput,
    class_probability,
)
from .conformance import ConformanceReport, run_conformance
from .http import HttpBackend
from .mock import MockBackend, MockBackendSpec, MockFallback, load_scripted_fixture
from .server import ServerThread, make_server

__all__ = [
    "Backend",
    "ConformanceReport",
    "GenerationMode",
    "GenerationRequest",
    "GenerationResult",
    "HttpBackend",
    "MockBackend",
    "MockBackendSpec",
    "MockFallback",
    "Normalization",
    "ScoredOutput",
    "ServerThread",
    "class_probability",
    "load_scripted_fixture",
    "make_server",
    "run_conformance",
]
