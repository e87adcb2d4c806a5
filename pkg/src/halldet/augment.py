"""Training-corpus production: NLI adaptation, explainer-generated
explanation augmentation, and seq2seq training-record emission.

The augmentation factor ``k`` is the number of generated explanations
requested per example; defaults follow the two training stages (1 while
pretraining on NLI corpora, 3 while fine-tuning on news data).
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .backends.base import Backend, GenerationMode, GenerationRequest
from .core import (
    Article,
    ArticleLayout,
    ExampleOrigin,
    Explanation,
    Headline,
    Label,
    LabeledExample,
)
from .errors import BackendError, DataError, UnsupportedLabel
from .templates import (
    DEFAULT_TEMPLATE,
    ComponentKind,
    TemplateConfig,
    render_explainer_input,
    render_hinted_input,
    render_reasoning_input,
    render_reasoning_target,
)

logger = logging.getLogger(__name__)

PRETRAINING_K = 1
FINE_TUNING_K = 3


class NeutralPolicy(enum.Enum):
    """What to do with three-way NLI "neutral" labels. Screening treats
    unsupported-but-not-contradicted as misleading when mapping."""

    REJECT = "reject"
    MAP_TO_CONTRADICT = "map_to_contradict"


@dataclass(frozen=True)
class AugmentationConfig:
    k: int = FINE_TUNING_K
    dedupe: bool = True
    seed: int = 0
    neutral_policy: NeutralPolicy = NeutralPolicy.REJECT

    def __post_init__(self) -> None:
        if self.k < 0:
            raise DataError(f"k must be >= 0, got {self.k}")

    @classmethod
    def pretraining(cls, **kwargs: Any) -> "AugmentationConfig":
        kwargs.setdefault("k", PRETRAINING_K)
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "dedupe": self.dedupe,
            "seed": self.seed,
            "neutral_policy": self.neutral_policy.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AugmentationConfig":
        kwargs: dict[str, Any] = {}
        if "k" in data:
            kwargs["k"] = int(data["k"])
        if "dedupe" in data:
            kwargs["dedupe"] = bool(data["dedupe"])
        if "seed" in data:
            kwargs["seed"] = int(data["seed"])
        if "neutral_policy" in data:
            kwargs["neutral_policy"] = NeutralPolicy(data["neutral_policy"])
        return cls(**kwargs)


_NLI_LABELS = {
    "entailment": Label.ENTAIL,
    "entail": Label.ENTAIL,
    "e": Label.ENTAIL,
    "0": Label.ENTAIL,
    "contradiction": Label.CONTRADICT,
    "contradict": Label.CONTRADICT,
    "c": Label.CONTRADICT,
    "2": Label.CONTRADICT,
}
_NLI_NEUTRAL = {"neutral", "n", "1"}


def nli_label(raw: str, neutral_policy: NeutralPolicy = NeutralPolicy.REJECT) -> Label:
    """Collapse a three-way NLI label string into the two-class space."""
    key = raw.strip().lower()
    if key in _NLI_LABELS:
        return _NLI_LABELS[key]
    if key in _NLI_NEUTRAL:
        if neutral_policy is NeutralPolicy.MAP_TO_CONTRADICT:
            return Label.CONTRADICT
        raise UnsupportedLabel("neutral NLI items have no two-class mapping (policy: reject)")
    raise UnsupportedLabel(f"unknown NLI label {raw!r}")


def adapt_nli_example(
    premise: str,
    hypothesis: str,
    label: Label | str,
    explanations: Sequence[str] = (),
    *,
    id: str | None = None,
    neutral_policy: NeutralPolicy = NeutralPolicy.REJECT,
) -> LabeledExample:
    """Map an NLI (premise, hypothesis, label) triple onto the domain:
    hypothesis becomes the headline, premise the article body (single
    grounding text, so concatenate layout). The first explanation, if any,
    is attached."""
    if not premise.strip():
        raise DataError("premise must be non-empty")
    if not hypothesis.strip():
        raise DataError("hypothesis must be non-empty")
    resolved = label if isinstance(label, Label) else nli_label(label, neutral_policy)
    explanation = None
    for text in explanations:
        if text.strip():
            explanation = Explanation(text)
            break
    if id is None:
        digest = hashlib.sha1(f"{premise}\x1f{hypothesis}".encode("utf-8")).hexdigest()
        id = f"nli-{digest[:12]}"
    return LabeledExample(
        id=id,
        article=Article(body=premise, layout=ArticleLayout.CONCATENATE),
        headline=Headline(hypothesis),
        label=resolved,
        explanation=explanation,
        origin=ExampleOrigin.NLI_ADAPTED,
    )


def augment_with_explainer(
    examples: Sequence[LabeledExample],
    backend: Backend,
    cfg: AugmentationConfig = AugmentationConfig(),
    template: TemplateConfig = DEFAULT_TEMPLATE,
) -> list[LabeledExample]:
    """Return all originals plus, per original, up to ``cfg.k`` copies that
    differ only in their explanation (a distinct explainer generation).

    Labels and pair texts are never altered. With dedupe on, generated
    explanations equal to each other or to the human explanation are
    dropped. Backend failures leave the affected example un-augmented.
    """
    for ex in examples:
        if not ex.is_labeled:
            raise DataError(f"example {ex.id!r} is unlabeled; augmentation needs labels")
    if cfg.k == 0:
        return list(examples)

    out: list[LabeledExample] = []
    for ex in examples:
        out.append(ex)
        request = GenerationRequest(
            input=render_explainer_input(ex, ex.label, template),
            mode=GenerationMode.EXPLAIN,
            num_outputs=cfg.k,
            seed=cfg.seed,
        )
        try:
            result = backend.generate(request)
        except BackendError as exc:
            logger.warning("explainer failed for %s; kept un-augmented: %s", ex.id, exc)
            continue
        texts = [o.text.strip() for o in result.outputs]
        if cfg.dedupe:
            seen = {ex.explanation.text} if ex.explanation is not None else set()
            kept = []
            for text in texts:
                if text not in seen:
                    seen.add(text)
                    kept.append(text)
            texts = kept
        for i, text in enumerate(texts, start=1):
            out.append(
                LabeledExample(
                    id=f"{ex.id}#aug{i}",
                    article=ex.article,
                    headline=ex.headline,
                    label=ex.label,
                    explanation=Explanation(text),
                    origin=ExampleOrigin.EXPLAINER_GENERATED,
                )
            )
    return out


@dataclass(frozen=True)
class TrainingRecord:
    """One teacher-forcing (input, target) pair for a component."""

    input: str
    target: str
    component: ComponentKind
    origin: ExampleOrigin

    def __post_init__(self) -> None:
        if not self.input or not self.target:
            raise DataError("training records need non-empty input and target")


_COMPONENT_ORDER = (
    ComponentKind.REASONING_CLASSIFIER,
    ComponentKind.HINTED_CLASSIFIER,
    ComponentKind.EXPLAINER,
)


def emit_training_records(
    examples: Sequence[LabeledExample],
    components: Iterable[ComponentKind] = _COMPONENT_ORDER,
    template: TemplateConfig = DEFAULT_TEMPLATE,
) -> list[TrainingRecord]:
    """Render teacher-forcing pairs for the requested components.

    Hinted-classifier and explainer records are only emitted for examples
    with a non-empty explanation: training on empty comments would teach
    the model to ignore the hint channel, and an explainer target must not
    be empty.
    """
    wanted = set(components)
    records: list[TrainingRecord] = []
    for ex in examples:
        if not ex.is_labeled:
            raise DataError(f"example {ex.id!r} is unlabeled; training emission needs labels")
        explanation = ex.explanation if ex.explanation is not None else Explanation("")
        for component in _COMPONENT_ORDER:
            if component not in wanted:
                continue
            if component is ComponentKind.REASONING_CLASSIFIER:
                records.append(
                    TrainingRecord(
                        input=render_reasoning_input(ex, template),
                        target=render_reasoning_target(ex.label, explanation, template),
                        component=component,
                        origin=ex.origin,
                    )
                )
            elif component is ComponentKind.HINTED_CLASSIFIER and explanation:
                records.append(
                    TrainingRecord(
                        input=render_hinted_input(ex, explanation, template),
                        target=template.token(ex.label),
                        component=component,
                        origin=ex.origin,
                    )
                )
            elif component is ComponentKind.EXPLAINER and explanation:
                records.append(
                    TrainingRecord(
                        input=render_explainer_input(ex, ex.label, template),
                        target=explanation.text,
                        component=component,
                        origin=ex.origin,
                    )
                )
    return records


def write_training_records(records: Sequence[TrainingRecord], path: str | Path) -> None:
    """JSONL emission: {"input", "target", "component", "origin"} per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(
                json.dumps(
                    {
                        "input": record.input,
                        "target": record.target,
                        "component": record.component.value,
                        "origin": record.origin.value,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_training_records(path: str | Path) -> list[TrainingRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            data = json.loads(line)
            records.append(
                TrainingRecord(
                    input=data["input"],
                    target=data["target"],
                    component=ComponentKind(data["component"]),
                    origin=ExampleOrigin(data["origin"]),
                )
            )
    return records


def write_training_records_tsv(records: Sequence[TrainingRecord], path: str | Path) -> None:
    """TSV emission (input TAB target) for seq2seq trainers.

    Tabs and newlines inside fields are replaced with single spaces; the
    JSONL format is the lossless one.
    """
    def clean(text: str) -> str:
        return text.replace("\t", " ").replace("\r", " ").replace("\n", " ")

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(f"{clean(record.input)}\t{clean(record.target)}\n")
