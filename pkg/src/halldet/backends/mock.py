"""Deterministic mock backend.

Two behaviors compose: exact-input scripted responses (for fixtures and
conformance testing) and a heuristic fallback that scores entailment by
normalized token overlap pushed through a temperature-controlled two-way
softmax. The heuristic gives plausible end-to-end demos without any model;
it is not a detector.

Determinism contract: identical (input, seed) pairs yield byte-identical
results across runs, platforms, and concurrent invocation orders. All
randomness is derived from a SHA-256 digest of (seed, input).
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import random
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..core import Label
from ..errors import BackendUnavailable, DataError, MalformedResponse
from ..templates import DEFAULT_TEMPLATE, TemplateConfig
from .base import (
    GenerationMode,
    GenerationRequest,
    GenerationResult,
    ScoredOutput,
    result_from_wire,
)


class MockFallback(enum.Enum):
    """What to do with inputs that have no scripted response."""

    HEURISTIC_OVERLAP = "heuristic_overlap"
    ERROR = "error"


@dataclass(frozen=True)
class MockBackendSpec:
    scripted_responses: Mapping[str, GenerationResult] = field(default_factory=dict)
    fallback: MockFallback = MockFallback.HEURISTIC_OVERLAP
    heuristic_temperature: float = 0.25

    def __post_init__(self) -> None:
        if self.heuristic_temperature <= 0.0:
            raise DataError("heuristic_temperature must be positive")
        object.__setattr__(self, "scripted_responses", dict(self.scripted_responses))


def load_scripted_fixture(path: str | Path) -> dict[str, GenerationResult]:
    """Load a scripted-response fixture file (see PROTOCOL.md).

    The file is ``{"responses": [{"input": ..., <wire result fields>}]}``;
    the same file drives any protocol implementation, which is what makes
    cross-implementation byte-identity checks possible.
    """
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict) or not isinstance(data.get("responses"), list):
        raise DataError(f"{path}: fixture must be an object with a 'responses' list")
    scripted: dict[str, GenerationResult] = {}
    for i, entry in enumerate(data["responses"]):
        if not isinstance(entry, dict) or not isinstance(entry.get("input"), str):
            raise DataError(f"{path}: responses[{i}] must carry a string 'input'")
        try:
            scripted[entry["input"]] = result_from_wire(entry)
        except MalformedResponse as exc:
            raise DataError(f"{path}: responses[{i}]: {exc}") from exc
    return scripted


def _derive_rng(request_input: str, seed: int | None) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{request_input}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _crude_tokens(text: str) -> list[str]:
    return [t for t in (w.strip(string.punctuation).lower() for w in text.split()) if t]


class MockBackend:
    """In-process deterministic backend honoring the generation contract."""

    def __init__(
        self,
        spec: MockBackendSpec | None = None,
        template: TemplateConfig = DEFAULT_TEMPLATE,
    ) -> None:
        self.spec = spec if spec is not None else MockBackendSpec()
        self.template = template

    def generate(self, request: GenerationRequest) -> GenerationResult:
        scripted = self.spec.scripted_responses.get(request.input)
        if scripted is not None:
            return self._adapt_scripted(scripted, request)
        if self.spec.fallback is MockFallback.ERROR:
            raise BackendUnavailable(
                f"no scripted response for input starting {request.input[:60]!r}"
            )
        return self._heuristic(request)

    # Scripted entries are stored mode-agnostically; serving adapts them:
    # outputs truncate to num_outputs and explain-mode responses drop the
    # class distribution. Protocol implementations must match this exactly.
    def _adapt_scripted(
        self, scripted: GenerationResult, request: GenerationRequest
    ) -> GenerationResult:
        outputs = scripted.outputs[: request.num_outputs]
        if request.mode is GenerationMode.EXPLAIN:
            return GenerationResult(outputs=outputs, class_logprobs=None)
        if scripted.class_logprobs is None:
            raise BackendUnavailable(
                "scripted response lacks class_logprobs required by a classify-mode request"
            )
        return GenerationResult(outputs=outputs, class_logprobs=scripted.class_logprobs)

    def _heuristic(self, request: GenerationRequest) -> GenerationResult:
        headline, article = self._split_input(request.input)
        h_tokens = _crude_tokens(headline)
        a_tokens = set(_crude_tokens(article))
        overlap = sum(1 for t in h_tokens if t in a_tokens) / len(h_tokens) if h_tokens else 0.0

        logprobs = self._overlap_logprobs(overlap)
        predicted = (
            Label.CONTRADICT
            if logprobs[Label.CONTRADICT] >= logprobs[Label.ENTAIL]
            else Label.ENTAIL
        )
        rng = _derive_rng(request.input, request.seed)

        if request.mode is GenerationMode.CLASSIFY:
            text = self.template.token(predicted)
            outputs = (ScoredOutput(text=text, logprob=logprobs[predicted]),)
            return GenerationResult(outputs=outputs, class_logprobs=logprobs)

        explanations = self._explanations(
            h_tokens, a_tokens, predicted, rng, request.num_outputs
        )
        if request.mode is GenerationMode.EXPLAIN:
            outputs = tuple(
                ScoredOutput(text=text, logprob=-round(rng.uniform(0.5, 4.0), 6))
                for text in explanations
            )
            return GenerationResult(outputs=outputs, class_logprobs=None)

        # classify_and_explain: decode "<class> because <explanation>"
        texts = [
            self.template.token(predicted) + self.template.because_delimiter + expl
            for expl in explanations
        ]
        outputs = tuple(ScoredOutput(text=text, logprob=logprobs[predicted]) for text in texts)
        return GenerationResult(outputs=outputs, class_logprobs=logprobs)

    def _overlap_logprobs(self, overlap: float) -> dict[Label, float]:
        t = self.spec.heuristic_temperature
        scores = {Label.ENTAIL: overlap / t, Label.CONTRADICT: (1.0 - overlap) / t}
        shift = max(scores.values())
        total = sum(math.exp(s - shift) for s in scores.values())
        return {label: (s - shift) - math.log(total) for label, s in scores.items()}

    def _split_input(self, text: str) -> tuple[str, str]:
        """Recover (headline, article-ish remainder) from a rendered input.

        Inputs that do not follow the template are treated as all-article,
        which drives overlap to zero rather than crashing.
        """
        cfg = self.template
        if not text.startswith(cfg.headline_prefix):
            return "", text
        rest = text[len(cfg.headline_prefix):]
        idx = rest.find(cfg.article_prefix)
        if idx < 0:
            return rest, ""
        headline = rest[:idx]
        article = rest[idx + len(cfg.article_prefix):]
        comment_idx = article.find(cfg.comment_prefix)
        if comment_idx >= 0:
            # overlap ignores the comment: generated explanations quote
            # headline tokens, and counting those would let the hint wash
            # out the pair signal
            article = article[:comment_idx]
        return headline, article

    def _explanations(
        self,
        h_tokens: list[str],
        a_tokens: set[str],
        predicted: Label,
        rng: random.Random,
        count: int,
    ) -> list[str]:
        missing = [t for t in h_tokens if t not in a_tokens]
        shared = [t for t in h_tokens if t in a_tokens]
        focus = missing[0] if missing else (shared[0] if shared else "the headline")
        anchor = shared[0] if shared else "the article"
        if predicted is Label.CONTRADICT:
            patterns = [
                f"{focus} is not supported by the article.",
                f"the article does not mention {focus}.",
                f"conflicting details - {focus} vs {anchor}.",
                f"{focus} is missing from the article which makes the headline misleading.",
            ]
        else:
            patterns = [
                f"the article states {anchor}.",
                f"the headline restates {anchor} from the article.",
                f"every headline claim including {anchor} appears in the article.",
                f"the article directly supports {anchor}.",
            ]
        rng.shuffle(patterns)
        texts: list[str] = []
        for i in range(count):
            base = patterns[i % len(patterns)]
            text = base if i < len(patterns) else f"{base} (variant {i // len(patterns) + 1})"
            texts.append(text)
        return texts
