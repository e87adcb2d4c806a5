"""Two-stage inference: reasoning classifier -> parse -> hinted classifier
-> averaging combiner, with ablation modes.

Full mode runs the reasoning stage in classify_and_explain mode, feeds the
parsed explanation back as a comment hint, classifies again, and averages
the two contradict probabilities. NO_HINTED stops after the reasoning
stage; NO_EXPLANATION runs a classify-only reasoning stage.

Unparseable reasoning output degrades that example to the no-hinted path
with a recorded warning instead of dropping it: hallucination screening
must not lose items silently.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence, Union

from .backends.base import (
    Backend,
    GenerationMode,
    GenerationRequest,
    GenerationResult,
    Normalization,
    class_probability,
)
from .core import Explanation, Label, LabeledExample, Prediction, PredictionMode
from .errors import BackendError, DataError, UnparseableOutput
from .templates import (
    TemplateConfig,
    parse_component_output,
    render_hinted_input,
    render_reasoning_input,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    mode: PredictionMode = PredictionMode.FULL
    threshold: float = 0.5
    normalization: Normalization = Normalization.RENORMALIZED_PAIR
    template: TemplateConfig = field(default_factory=TemplateConfig)
    seed: int | None = None
    max_output_tokens: int = 128

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise DataError(f"threshold must be within [0, 1], got {self.threshold!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "threshold": self.threshold,
            "normalization": self.normalization.value,
            "template": self.template.to_dict(),
            "seed": self.seed,
            "max_output_tokens": self.max_output_tokens,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        kwargs: dict[str, Any] = {}
        if "mode" in data:
            kwargs["mode"] = PredictionMode(data["mode"])
        if "threshold" in data:
            kwargs["threshold"] = float(data["threshold"])
        if "normalization" in data:
            kwargs["normalization"] = Normalization(data["normalization"])
        if "template" in data:
            kwargs["template"] = TemplateConfig.from_dict(data["template"])
        if "seed" in data:
            kwargs["seed"] = data["seed"]
        if "max_output_tokens" in data:
            kwargs["max_output_tokens"] = int(data["max_output_tokens"])
        return cls(**kwargs)


def combine(reasoning_prob: float, hinted_prob: float) -> float:
    """Averaging combiner over the two stage probabilities."""
    for name, p in (("reasoning_prob", reasoning_prob), ("hinted_prob", hinted_prob)):
        if not 0.0 <= p <= 1.0:
            raise DataError(f"{name} must be within [0, 1], got {p!r}")
    return (reasoning_prob + hinted_prob) / 2.0


def _contradict_prob(result: GenerationResult, normalization: Normalization) -> float:
    return class_probability(result, Label.CONTRADICT, normalization)


def score(
    example: LabeledExample,
    backend: Backend,
    cfg: PipelineConfig = PipelineConfig(),
) -> Prediction:
    """Score one example; see module docstring for the three modes."""
    reasoning_input = render_reasoning_input(example, cfg.template)
    warnings: list[str] = []

    if cfg.mode is PredictionMode.NO_EXPLANATION:
        result = backend.generate(_request(reasoning_input, GenerationMode.CLASSIFY, cfg))
        prob = _contradict_prob(result, cfg.normalization)
        return _prediction(prob, Explanation(""), PredictionMode.NO_EXPLANATION,
                           reasoning_prob=prob, hinted_prob=None, cfg=cfg, warnings=warnings)

    result = backend.generate(_request(reasoning_input, GenerationMode.CLASSIFY_AND_EXPLAIN, cfg))
    reasoning_prob = _contradict_prob(result, cfg.normalization)
    explanation = Explanation("")
    parsed = False
    if result.outputs:
        try:
            _, explanation = parse_component_output(result.outputs[0].text, cfg.template)
            parsed = True
        except UnparseableOutput as exc:
            warnings.append(f"unparseable reasoning output; degraded to no-hinted path: {exc}")
    else:
        warnings.append("reasoning stage returned no output sequence; degraded to no-hinted path")

    if cfg.mode is PredictionMode.NO_HINTED or not parsed:
        if warnings:
            logger.warning("example %s: %s", example.id, "; ".join(warnings))
        return _prediction(reasoning_prob, explanation, PredictionMode.NO_HINTED,
                           reasoning_prob=reasoning_prob, hinted_prob=None, cfg=cfg,
                           warnings=warnings)

    # hinted stage runs even for an empty explanation (degenerate template)
    hinted_input = render_hinted_input(example, explanation, cfg.template)
    hinted_result = backend.generate(_request(hinted_input, GenerationMode.CLASSIFY, cfg))
    hinted_prob = _contradict_prob(hinted_result, cfg.normalization)
    final = combine(reasoning_prob, hinted_prob)
    return _prediction(final, explanation, PredictionMode.FULL,
                       reasoning_prob=reasoning_prob, hinted_prob=hinted_prob, cfg=cfg,
                       warnings=warnings)


def _request(text: str, mode: GenerationMode, cfg: PipelineConfig) -> GenerationRequest:
    return GenerationRequest(
        input=text,
        mode=mode,
        num_outputs=1,
        seed=cfg.seed,
        max_output_tokens=cfg.max_output_tokens,
    )


def _prediction(
    prob: float,
    explanation: Explanation,
    mode: PredictionMode,
    *,
    reasoning_prob: float | None,
    hinted_prob: float | None,
    cfg: PipelineConfig,
    warnings: list[str],
) -> Prediction:
    label = Label.CONTRADICT if prob >= cfg.threshold else Label.ENTAIL
    return Prediction(
        hallucination_prob=prob,
        label=label,
        explanation=explanation,
        mode=mode,
        reasoning_prob=reasoning_prob,
        hinted_prob=hinted_prob,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class ScoreFailure:
    """A per-example failure inside a batch; batches never abort."""

    example_id: str
    message: str
    kind: str  # "backend" or "data"


BatchItem = Union[Prediction, ScoreFailure]


def score_batch(
    examples: Sequence[LabeledExample],
    backend: Backend,
    cfg: PipelineConfig = PipelineConfig(),
    *,
    concurrency: int | None = None,
) -> list[BatchItem]:
    """Score a batch, preserving input order regardless of internal
    concurrency. Per-example failures become ScoreFailure entries."""
    if concurrency is None:
        concurrency = getattr(backend, "max_concurrency", 1)
    if concurrency < 1:
        raise DataError(f"concurrency must be >= 1, got {concurrency}")
    if not examples:
        return []

    def run(example: LabeledExample) -> BatchItem:
        try:
            return score(example, backend, cfg)
        except BackendError as exc:
            logger.warning("example %s failed: %s", example.id, exc)
            return ScoreFailure(example_id=example.id, message=str(exc), kind="backend")
        except DataError as exc:
            logger.warning("example %s failed: %s", example.id, exc)
            return ScoreFailure(example_id=example.id, message=str(exc), kind="data")

    if concurrency == 1:
        return [run(example) for example in examples]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        return list(pool.map(run, examples))
