"""Backend conformance suite.

Any implementation of the wire protocol (or of the in-process Backend
contract) that passes this suite is interchangeable in the pipeline
without behavior change on scripted fixtures. The native mock passes it;
external shims are validated against the same checks and fixture file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from ..core import Label
from ..errors import BackendError, BackendUnavailable
from .base import (
    Backend,
    GenerationMode,
    GenerationRequest,
    GenerationResult,
    class_probability,
)

_DEFAULT_PROBE = (
    "headline entailment: headline: A man pushes a cart "
    "article: A man with a beige jacket carries a water jug and pushes a food cart."
)


@dataclass(frozen=True)
class ConformanceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ConformanceReport:
    checks: tuple[ConformanceCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ConformanceCheck]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail and not c.passed else "") for c in self.checks]
        return "\n".join(lines)


def run_conformance(
    backend: Backend,
    *,
    fixture: Mapping[str, GenerationResult] | None = None,
    expect_error_on_unscripted: bool = False,
) -> ConformanceReport:
    """Exercise all three modes, determinism under seed, and (optionally)
    scripted equivalence and error signaling."""
    checks: list[ConformanceCheck] = []
    probe = next(iter(fixture)) if fixture else _DEFAULT_PROBE

    def record(name: str, fn) -> None:
        try:
            detail = fn() or ""
            checks.append(ConformanceCheck(name, True, detail))
        except AssertionError as exc:
            checks.append(ConformanceCheck(name, False, str(exc)))
        except BackendError as exc:
            checks.append(ConformanceCheck(name, False, f"backend error: {exc}"))

    def check_classify() -> None:
        result = backend.generate(
            GenerationRequest(input=probe, mode=GenerationMode.CLASSIFY, num_outputs=1, seed=0)
        )
        assert result.class_logprobs is not None, "classify result lacks class_logprobs"
        for label in Label:
            lp = result.class_logprobs[label]
            assert math.isfinite(lp) and lp <= 0.0, f"logprob for {label.value} out of range"
        total = sum(class_probability(result, label) for label in Label)
        assert abs(total - 1.0) < 1e-12, f"renormalized pair sums to {total}"
        assert len(result.outputs) <= 1, "classify returned more outputs than requested"

    def check_classify_and_explain() -> None:
        result = backend.generate(
            GenerationRequest(
                input=probe, mode=GenerationMode.CLASSIFY_AND_EXPLAIN, num_outputs=1, seed=0
            )
        )
        assert result.class_logprobs is not None, "classify_and_explain lacks class_logprobs"
        assert len(result.outputs) >= 1, "classify_and_explain returned no outputs"

    def check_explain() -> None:
        request = GenerationRequest(
            input=probe, mode=GenerationMode.EXPLAIN, num_outputs=3, seed=7
        )
        result = backend.generate(request)
        assert len(result.outputs) <= 3, "explain exceeded num_outputs"
        assert result.class_logprobs is None, "explain-mode result must not carry class_logprobs"

    def check_determinism() -> None:
        request = GenerationRequest(
            input=probe, mode=GenerationMode.EXPLAIN, num_outputs=3, seed=11
        )
        first = backend.generate(request)
        second = backend.generate(request)
        assert first == second, "identical (input, seed) produced different results"

    record("classify mode round-trip", check_classify)
    record("classify_and_explain mode round-trip", check_classify_and_explain)
    record("explain mode round-trip", check_explain)
    record("determinism under seed", check_determinism)

    if fixture:
        def check_scripted() -> str:
            for text, expected in fixture.items():
                request = GenerationRequest(
                    input=text,
                    mode=GenerationMode.CLASSIFY_AND_EXPLAIN,
                    num_outputs=max(1, len(expected.outputs)),
                    seed=0,
                )
                got = backend.generate(request)
                assert got == expected, f"scripted mismatch for input starting {text[:40]!r}"
            return f"{len(fixture)} scripted inputs matched"

        record("scripted fixture equivalence", check_scripted)

    if expect_error_on_unscripted:
        def check_error_signaling() -> None:
            try:
                backend.generate(
                    GenerationRequest(
                        input="@@halldet-conformance-unscripted-input@@",
                        mode=GenerationMode.CLASSIFY,
                    )
                )
            except BackendUnavailable:
                return
            raise AssertionError("unscripted input did not signal BackendUnavailable")

        record("error signaling on unscripted input", check_error_signaling)

    return ConformanceReport(tuple(checks))
