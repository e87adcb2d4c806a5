"""Shared domain vocabulary: articles, headlines, labels, explanations,
examples, and pipeline predictions.

All types are immutable values and safe to share across threads. The
``Label`` enum is the single source of truth for the two-class space:
``CONTRADICT`` is the "hallucinated" (positive) class everywhere in the
toolkit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DataError, UnknownClassToken


class Label(enum.Enum):
    """Binary verdict for an (article, headline) pair."""

    ENTAIL = "entail"
    CONTRADICT = "contradict"

    @classmethod
    def from_string(cls, value: str) -> "Label":
        v = value.strip().lower()
        for label in cls:
            if label.value == v:
                return label
        raise DataError(f"unknown label string {value!r}; expected 'entail' or 'contradict'")


#: Default decoded class-token strings. Configurable via TemplateConfig so
#: single-character token schemes can be swapped in without code changes.
DEFAULT_CLASS_TOKENS: Mapping[Label, str] = {
    Label.ENTAIL: "Entail",
    Label.CONTRADICT: "Contradict",
}


def label_from_token(token: str, class_tokens: Mapping[Label, str] | None = None) -> Label:
    """Map a decoded class token to its Label, case-insensitively.

    Raises UnknownClassToken when the trimmed token matches no configured
    class-token string.
    """
    tokens = class_tokens if class_tokens is not None else DEFAULT_CLASS_TOKENS
    needle = token.strip().lower()
    for label, rendered in tokens.items():
        if needle == rendered.strip().lower():
            return label
    raise UnknownClassToken(f"token {token!r} matches none of {sorted(tokens.values())}")


class ArticleLayout(enum.Enum):
    """How an article's title and body are flattened into one text."""

    TITLE_PASSAGE = "title_passage"
    CONCATENATE = "concatenate"


@dataclass(frozen=True)
class Article:
    """A news article (or grounding text). At least one of title/body must
    be non-empty.

    ``layout`` records how this article should be flattened to text:
    news articles render as "title: ... passage: ..." while single
    grounding texts (NLI premises, faithfulness benchmarks) concatenate.
    """

    title: str = ""
    body: str = ""
    source_id: str | None = None
    layout: ArticleLayout = ArticleLayout.TITLE_PASSAGE

    def __post_init__(self) -> None:
        object.__setattr__(self, "title", self.title.strip())
        object.__setattr__(self, "body", self.body.strip())
        if not self.title and not self.body:
            raise DataError("article needs a non-empty title or body")


def article_text(article: Article, layout: ArticleLayout | None = None) -> str:
    """Flatten an article into a single text per the requested layout.

    TITLE_PASSAGE produces "title: <title> passage: <body>"; CONCATENATE
    joins title and body with a newline. Missing parts are omitted along
    with their prefixes.
    """
    layout = layout if layout is not None else article.layout
    if layout is ArticleLayout.TITLE_PASSAGE:
        parts = []
        if article.title:
            parts.append(f"title: {article.title}")
        if article.body:
            parts.append(f"passage: {article.body}")
        return " ".join(parts)
    parts = [p for p in (article.title, article.body) if p]
    return "\n".join(parts)


@dataclass(frozen=True)
class Headline:
    """A candidate headline; non-empty after trimming."""

    text: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", self.text.strip())
        if not self.text:
            raise DataError("headline text is empty")


@dataclass(frozen=True)
class Explanation:
    """Free-text rationale for a label. Empty text is legal and means
    "no explanation given"."""

    text: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", self.text.strip())

    def __bool__(self) -> bool:
        return bool(self.text)


class ExampleOrigin(enum.Enum):
    """Provenance of an example's (label, explanation), used when emitting
    training records."""

    HUMAN = "human"
    EXPLAINER_GENERATED = "explainer_generated"
    NLI_ADAPTED = "nli_adapted"


@dataclass(frozen=True)
class LabeledExample:
    """An (article, headline) pair with optional label and explanation.

    An explanation may only be present when a label is present.
    """

    id: str
    article: Article
    headline: Headline
    label: Label | None = None
    explanation: Explanation | None = None
    origin: ExampleOrigin = ExampleOrigin.HUMAN

    def __post_init__(self) -> None:
        if self.explanation is not None and self.label is None:
            raise DataError(f"example {self.id!r} has an explanation but no label")

    @property
    def is_labeled(self) -> bool:
        return self.label is not None


class PredictionMode(enum.Enum):
    """Which inference path produced a prediction."""

    FULL = "full"
    NO_HINTED = "no_hinted"
    NO_EXPLANATION = "no_explanation"


@dataclass(frozen=True)
class Prediction:
    """Final pipeline verdict for one example.

    ``hallucination_prob`` is the combined P(contradict); the per-stage
    sub-scores are kept so ablations and combiner changes stay auditable.
    """

    hallucination_prob: float
    label: Label
    explanation: Explanation
    mode: PredictionMode
    reasoning_prob: float | None = None
    hinted_prob: float | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        for name in ("hallucination_prob", "reasoning_prob", "hinted_prob"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise DataError(f"{name} must be within [0, 1], got {value!r}")
        if self.mode is PredictionMode.FULL:
            if self.reasoning_prob is None or self.hinted_prob is None:
                raise DataError("full-mode predictions carry both stage sub-scores")
