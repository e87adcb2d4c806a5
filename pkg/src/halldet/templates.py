"""Input/output templating for the three text-to-text components.

The three components share one input skeleton:

    reasoning classifier  "headline entailment: headline: H article: A"
                              -> "<class> because <explanation>"
    hinted classifier     reasoning input + " comment: <explanation>"
                              -> "<class>"
    explainer             reasoning input + " <class> because"
                              -> "<explanation>"

Templates are data (``TemplateConfig``), not code, so alternative class
tokens or delimiters are configuration changes. Rendering is deterministic
and parsing splits on the *first* delimiter occurrence: explanations
legitimately contain "because", class tokens never do (enforced here).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

from .core import (
    DEFAULT_CLASS_TOKENS,
    Explanation,
    Label,
    LabeledExample,
    article_text,
    label_from_token,
)
from .errors import DataError, UnknownClassToken, UnparseableOutput


class ComponentKind(enum.Enum):
    """The three seq2seq components of the detection framework."""

    REASONING_CLASSIFIER = "reasoning_classifier"
    HINTED_CLASSIFIER = "hinted_classifier"
    EXPLAINER = "explainer"


@dataclass(frozen=True)
class TemplateConfig:
    """Strings that make up component inputs and targets.

    Invariants: delimiter and prefixes are non-empty; class tokens are
    distinct and neither contains the delimiter.
    """

    class_tokens: Mapping[Label, str] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_TOKENS)
    )
    because_delimiter: str = " because "
    headline_prefix: str = "headline entailment: headline: "
    article_prefix: str = " article: "
    comment_prefix: str = " comment: "

    def __post_init__(self) -> None:
        for name in ("because_delimiter", "headline_prefix", "article_prefix", "comment_prefix"):
            if not getattr(self, name):
                raise DataError(f"template field {name} must be non-empty")
        tokens = [self.class_tokens.get(label, "") for label in Label]
        if any(not t for t in tokens):
            raise DataError("class_tokens must provide a non-empty token for every label")
        if len({t.strip().lower() for t in tokens}) != len(tokens):
            raise DataError("class tokens must be distinct (case-insensitively)")
        for t in tokens:
            if self.because_delimiter in t:
                raise DataError(f"class token {t!r} contains the delimiter")

    def token(self, label: Label) -> str:
        return self.class_tokens[label]

    def to_dict(self) -> dict[str, Any]:
        return {
            "class_tokens": {label.value: token for label, token in self.class_tokens.items()},
            "because_delimiter": self.because_delimiter,
            "headline_prefix": self.headline_prefix,
            "article_prefix": self.article_prefix,
            "comment_prefix": self.comment_prefix,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TemplateConfig":
        kwargs: dict[str, Any] = {}
        if "class_tokens" in data:
            kwargs["class_tokens"] = {
                Label.from_string(key): value for key, value in data["class_tokens"].items()
            }
        for name in ("because_delimiter", "headline_prefix", "article_prefix", "comment_prefix"):
            if name in data:
                kwargs[name] = data[name]
        return cls(**kwargs)


DEFAULT_TEMPLATE = TemplateConfig()


def render_reasoning_input(example: LabeledExample, cfg: TemplateConfig = DEFAULT_TEMPLATE) -> str:
    """Render the reasoning-classifier input. Label and explanation are ignored."""
    return (
        cfg.headline_prefix
        + example.headline.text
        + cfg.article_prefix
        + article_text(example.article)
    )


def render_reasoning_target(
    label: Label,
    explanation: Explanation,
    cfg: TemplateConfig = DEFAULT_TEMPLATE,
) -> str:
    """Render "<class> because <explanation>"; a bare class token when the
    explanation is empty (no dangling delimiter)."""
    token = cfg.token(label)
    if not explanation:
        return token
    return token + cfg.because_delimiter + explanation.text

def render_hinted_input(
    example: LabeledExample,
    hint: Explanation,
    cfg: TemplateConfig = DEFAULT_TEMPLATE,
) -> str:
    """Reasoning input extended with the explanation as a comment hint.

    The comment prefix is appended even for an empty hint, matching the
    degenerate template.
    """
    return render_reasoning_input(example, cfg) + cfg.comment_prefix + hint.text


def render_explainer_input(
    example: LabeledExample,
    label: Label,
    cfg: TemplateConfig = DEFAULT_TEMPLATE,
) -> str:
    """Input for the explainer, which already carries the class and ends
    right before where the explanation should start."""
    return (
        render_reasoning_input(example, cfg)
        + " "
        + cfg.token(label)
        + cfg.because_delimiter.rstrip()
    )


def parse_component_output(
    output: str,
    cfg: TemplateConfig = DEFAULT_TEMPLATE,
) -> tuple[Label, Explanation]:
    """Parse "<class>[ because <explanation>]" into (label, explanation).

    Splits on the first delimiter occurrence; the explanation may itself
    contain the delimiter word. Raises UnparseableOutput when the left
    side is not a class token. Never raises on arbitrary text otherwise.
    """
    idx = output.find(cfg.because_delimiter)
    if idx < 0:
        head, tail = output, ""
    else:
        head = output[:idx]
        tail = output[idx + len(cfg.because_delimiter):]
    try:
        label = label_from_token(head, cfg.class_tokens)
    except UnknownClassToken as exc:
        raise UnparseableOutput(f"cannot parse component output {output!r}: {exc}") from exc
    return label, Explanation(tail)
