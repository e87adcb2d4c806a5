"""Generation backend contract: requests, results, class probabilities,
and the wire-format helpers shared by the HTTP client and servers.

The wire protocol is documented in PROTOCOL.md at the repository root.
Field names there are a bit-exact contract; this module is the single
place that maps them to and from domain objects.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping, Protocol, runtime_checkable

from ..core import Label
from ..errors import DataError, MalformedResponse, MissingClassLogprobs


class GenerationMode(enum.Enum):
    """What the caller wants decoded.

    CLASSIFY implies one-step decoding semantics: the interesting payload
    is the first-token class distribution, not the text.
    """

    CLASSIFY = "classify"
    CLASSIFY_AND_EXPLAIN = "classify_and_explain"
    EXPLAIN = "explain"


#: Modes whose results must carry class log-probabilities.
CLASSIFY_MODES = (GenerationMode.CLASSIFY, GenerationMode.CLASSIFY_AND_EXPLAIN)


@dataclass(frozen=True)
class GenerationRequest:
    input: str
    mode: GenerationMode
    num_outputs: int = 1
    seed: int | None = None
    max_output_tokens: int = 128

    def __post_init__(self) -> None:
        if self.num_outputs < 1:
            raise DataError(f"num_outputs must be >= 1, got {self.num_outputs}")
        if self.max_output_tokens < 1:
            raise DataError(f"max_output_tokens must be >= 1, got {self.max_output_tokens}")


@dataclass(frozen=True)
class ScoredOutput:
    """One decoded sequence with its total log-probability."""

    text: str
    logprob: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.logprob) and self.logprob <= 0.0):
            raise DataError(f"sequence logprob must be finite and <= 0, got {self.logprob!r}")


@dataclass(frozen=True)
class GenerationResult:
    """Decoded outputs plus, in classify modes, the first-position class
    log-probabilities for both labels."""

    outputs: tuple[ScoredOutput, ...]
    class_logprobs: Mapping[Label, float] | None = None

    def __post_init__(self) -> None:
        if self.class_logprobs is not None:
            object.__setattr__(self, "class_logprobs", dict(self.class_logprobs))
            for label in Label:
                if label not in self.class_logprobs:
                    raise DataError(f"class_logprobs missing entry for {label.value}")
            for label, lp in self.class_logprobs.items():
                if not (math.isfinite(lp) and lp <= 0.0):
                    raise DataError(f"class logprob for {label.value} must be finite and <= 0")


@runtime_checkable
class Backend(Protocol):
    """Anything that can serve generation requests.

    Implementations must be safe for concurrent ``generate`` calls and, for
    a fixed (input, seed) pair, deterministic wherever they claim to be.
    """

    def generate(self, request: GenerationRequest) -> GenerationResult:  # pragma: no cover
        ...


class Normalization(enum.Enum):
    """How class log-probabilities become a probability in [0, 1].

    RAW_FIRST_TOKEN reproduces the literal first-token probability, which
    leaves mass on non-class tokens; RENORMALIZED_PAIR renormalizes over
    the two labels so stage scores are comparable for averaging.
    """

    RAW_FIRST_TOKEN = "raw_first_token"
    RENORMALIZED_PAIR = "renormalized_pair"


def class_probability(
    result: GenerationResult,
    target: Label,
    normalization: Normalization = Normalization.RENORMALIZED_PAIR,
) -> float:
    """Probability of ``target`` under the result's class distribution."""
    if result.class_logprobs is None:
        raise MissingClassLogprobs("result has no class log-probabilities")
    logprobs = result.class_logprobs
    if normalization is Normalization.RAW_FIRST_TOKEN:
        return math.exp(logprobs[target])
    shift = max(logprobs.values())
    weights = {label: math.exp(lp - shift) for label, lp in logprobs.items()}
    return weights[target] / sum(weights.values())


# --- wire format ------------------------------------------------------------
#
# Request:  {"input": str, "mode": str, "num_outputs": int, "seed": int|null,
#            "max_output_tokens": int}
# Response: {"outputs": [{"text": str, "logprob": number}, ...],
#            "class_logprobs": {"entail": number, "contradict": number} | null}

def request_to_wire(request: GenerationRequest) -> dict[str, Any]:
    return {
        "input": request.input,
        "mode": request.mode.value,
        "num_outputs": request.num_outputs,
        "seed": request.seed,
        "max_output_tokens": request.max_output_tokens,
    }


def request_from_wire(body: Mapping[str, Any]) -> GenerationRequest:
    """Parse a wire request body; raises DataError on shape violations."""
    if not isinstance(body, Mapping):
        raise DataError("request body must be a JSON object")
    for required in ("input", "mode"):
        if required not in body:
            raise DataError(f"request missing field {required!r}")
    if not isinstance(body["input"], str):
        raise DataError("request field 'input' must be a string")
    try:
        mode = GenerationMode(body["mode"])
    except ValueError as exc:
        raise DataError(f"unknown mode {body['mode']!r}") from exc
    num_outputs = body.get("num_outputs", 1)
    seed = body.get("seed")
    max_output_tokens = body.get("max_output_tokens", 128)
    if not isinstance(num_outputs, int) or isinstance(num_outputs, bool):
        raise DataError("request field 'num_outputs' must be an integer")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise DataError("request field 'seed' must be an integer or null")
    if not isinstance(max_output_tokens, int) or isinstance(max_output_tokens, bool):
        raise DataError("request field 'max_output_tokens' must be an integer")
    return GenerationRequest(
        input=body["input"],
        mode=mode,
        num_outputs=num_outputs,
        seed=seed,
        max_output_tokens=max_output_tokens,
    )


def result_to_wire(result: GenerationResult) -> dict[str, Any]:
    """Serialize a result in canonical field order (see PROTOCOL.md)."""
    wire: dict[str, Any] = {
        "outputs": [{"text": out.text, "logprob": out.logprob} for out in result.outputs],
    }
    if result.class_logprobs is None:
        wire["class_logprobs"] = None
    else:
        wire["class_logprobs"] = {
            Label.ENTAIL.value: result.class_logprobs[Label.ENTAIL],
            Label.CONTRADICT.value: result.class_logprobs[Label.CONTRADICT],
        }
    return wire


def result_from_wire(body: Any) -> GenerationResult:
    """Parse a wire response body; raises MalformedResponse on violations."""
    if not isinstance(body, Mapping):
        raise MalformedResponse("response body must be a JSON object")
    raw_outputs = body.get("outputs")
    if not isinstance(raw_outputs, list):
        raise MalformedResponse("response field 'outputs' must be a list")
    outputs = []
    for i, item in enumerate(raw_outputs):
        if not isinstance(item, Mapping) or "text" not in item or "logprob" not in item:
            raise MalformedResponse(f"outputs[{i}] must carry 'text' and 'logprob'")
        text, logprob = item["text"], item["logprob"]
        if not isinstance(text, str) or not isinstance(logprob, (int, float)) or isinstance(logprob, bool):
            raise MalformedResponse(f"outputs[{i}] has wrong field types")
        try:
            outputs.append(ScoredOutput(text=text, logprob=float(logprob)))
        except DataError as exc:
            raise MalformedResponse(str(exc)) from exc
    raw_lps = body.get("class_logprobs")
    class_logprobs = None
    if raw_lps is not None:
        if not isinstance(raw_lps, Mapping):
            raise MalformedResponse("'class_logprobs' must be an object or null")
        class_logprobs = {}
        for label in Label:
            if label.value not in raw_lps:
                raise MalformedResponse(f"class_logprobs missing key {label.value!r}")
            lp = raw_lps[label.value]
            if not isinstance(lp, (int, float)) or isinstance(lp, bool):
                raise MalformedResponse(f"class_logprobs[{label.value!r}] must be a number")
            class_logprobs[label] = float(lp)
    try:
        return GenerationResult(outputs=tuple(outputs), class_logprobs=class_logprobs)
    except DataError as exc:
        raise MalformedResponse(str(exc)) from exc
