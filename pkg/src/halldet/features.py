"""Handcrafted string features for the classical baselines, plus a small
seeded logistic-regression trainer so the feature set is end-to-end
testable without external trainers.

Tokenization here is deliberately crude (whitespace split, lowercase,
punctuation stripped from token edges) to mirror a feature-engineering
baseline; it is frozen by golden tests. Kernel and tree models are not
reimplemented: export the CSV (documented column order) and train those
elsewhere.
"""

from __future__ import annotations

import csv
import json
import math
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .core import ArticleLayout, Label, LabeledExample, article_text
from .errors import DataError, DegenerateData

FEATURE_NAMES: tuple[str, ...] = (
    "headline_len_tokens",
    "article_len_tokens",
    "headline_len_chars",
    "article_len_chars",
    "overlap_word_count",
    "overlap_word_ratio",
    "jaro_winkler_tokens",
    "jaro_winkler_chars_title",
)


def normalize_tokens(text: str) -> list[str]:
    """Whitespace split, lowercase, strip punctuation from token edges,
    drop tokens that vanish."""
    tokens = []
    for word in text.split():
        token = word.strip(string.punctuation).lower()
        if token:
            tokens.append(token)
    return tokens


def jaro_winkler(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Prefix-boosted Jaro similarity over arbitrary symbol sequences
    (characters of a string or a list of tokens).

    Match window is floor(max(|a|,|b|)/2) - 1 (min 0); transpositions are
    half the out-of-order matches; the Winkler boost uses prefix length
    up to 4 with scale 0.1. Conventions: empty-vs-empty is 1.0,
    empty-vs-nonempty is 0.0.
    """
    if len(a) == 0 and len(b) == 0:
        return 1.0
    if len(a) == 0 or len(b) == 0:
        return 0.0

    window = max(max(len(a), len(b)) // 2 - 1, 0)
    a_matched = [False] * len(a)
    b_matched = [False] * len(b)
    matches = 0
    for i in range(len(a)):
        lo = max(0, i - window)
        hi = min(i + window + 1, len(b))
        for j in range(lo, hi):
            if not b_matched[j] and a[i] == b[j]:
                a_matched[i] = True
                b_matched[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0

    a_seq = [a[i] for i in range(len(a)) if a_matched[i]]
    b_seq = [b[j] for j in range(len(b)) if b_matched[j]]
    half_transpositions = sum(1 for x, y in zip(a_seq, b_seq) if x != y)
    transpositions = half_transpositions / 2.0

    jaro = (
        matches / len(a) + matches / len(b) + (matches - transpositions) / matches
    ) / 3.0

    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix >= 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


@dataclass(frozen=True)
class FeatureVector:
    headline_len_tokens: int
    article_len_tokens: int
    headline_len_chars: int
    article_len_chars: int
    overlap_word_count: int
    overlap_word_ratio: float
    jaro_winkler_tokens: float
    jaro_winkler_chars_title: float

    def __post_init__(self) -> None:
        if self.overlap_word_count > min(self.headline_len_tokens, self.article_len_tokens):
            raise DataError("overlap count exceeds a token length")
        for name in ("overlap_word_ratio", "jaro_winkler_tokens", "jaro_winkler_chars_title"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{name} must be within [0, 1], got {value!r}")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)


def extract_features(example: LabeledExample) -> FeatureVector:
    """Compute the baseline feature vector for one (article, headline) pair."""
    headline = example.headline.text
    article_full = article_text(example.article, ArticleLayout.CONCATENATE)

    h_tokens = normalize_tokens(headline)
    a_tokens = normalize_tokens(article_full)

    remaining: dict[str, int] = {}
    for token in a_tokens:
        remaining[token] = remaining.get(token, 0) + 1
    overlap = 0
    for token in h_tokens:
        if remaining.get(token, 0) > 0:
            remaining[token] -= 1
            overlap += 1

    return FeatureVector(
        headline_len_tokens=len(h_tokens),
        article_len_tokens=len(a_tokens),
        headline_len_chars=len(headline),
        article_len_chars=len(article_full),
        overlap_word_count=overlap,
        overlap_word_ratio=overlap / len(h_tokens) if h_tokens else 0.0,
        jaro_winkler_tokens=jaro_winkler(h_tokens, a_tokens),
        jaro_winkler_chars_title=jaro_winkler(
            headline.lower(), example.article.title.lower()
        ),
    )


def feature_matrix(examples: Sequence[LabeledExample]) -> np.ndarray:
    return np.array([extract_features(ex).as_tuple() for ex in examples], dtype=float)


@dataclass(frozen=True)
class LinearModel:
    """Logistic model over raw feature values (standardization is folded
    into the weights after training)."""

    weights: tuple[float, ...]
    bias: float

    def __post_init__(self) -> None:
        if len(self.weights) != len(FEATURE_NAMES):
            raise DataError(
                f"expected {len(FEATURE_NAMES)} weights, got {len(self.weights)}"
            )

    def score_features(self, features: FeatureVector) -> float:
        """P(contradict) for one feature vector."""
        z = self.bias + sum(w * x for w, x in zip(self.weights, features.as_tuple()))
        return 1.0 / (1.0 + math.exp(-z))

    def score_example(self, example: LabeledExample) -> float:
        return self.score_features(extract_features(example))

    def predict(self, example: LabeledExample, threshold: float = 0.5) -> Label:
        return Label.CONTRADICT if self.score_example(example) >= threshold else Label.ENTAIL

    def to_dict(self) -> dict:
        return {"weights": list(self.weights), "bias": self.bias}

    @classmethod
    def from_dict(cls, data: dict) -> "LinearModel":
        return cls(weights=tuple(float(w) for w in data["weights"]), bias=float(data["bias"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LinearModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _labels_to_y(examples: Sequence[LabeledExample]) -> np.ndarray:
    y = []
    for ex in examples:
        if ex.label is None:
            raise DataError(f"example {ex.id!r} is unlabeled")
        y.append(1.0 if ex.label is Label.CONTRADICT else 0.0)
    return np.array(y)


def train_linear_on_matrix(
    X: np.ndarray,
    y: np.ndarray,
    *,
    epochs: int = 500,
    learning_rate: float = 0.5,
    seed: int = 0,
) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent on logistic loss over standardized
    features; returns weights/bias folded back to raw feature space.

    Full-batch descent from a zero start is deterministic; the seed is
    accepted for interface stability with stochastic trainers.
    """
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DataError("feature matrix and labels are misaligned")
    if len(set(y.tolist())) < 2:
        raise DegenerateData("training needs at least one example per class")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    Xs = (X - mean) / std

    n = Xs.shape[0]
    w = np.zeros(Xs.shape[1])
    b = 0.0
    for _ in range(epochs):
        z = Xs @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        grad_w = Xs.T @ (p - y) / n
        grad_b = float(np.mean(p - y))
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b

    raw_w = w / std
    raw_b = b - float(np.dot(w, mean / std))
    return raw_w, raw_b


def train_linear(
    examples: Sequence[LabeledExample],
    *,
    epochs: int = 500,
    learning_rate: float = 0.5,
    seed: int = 0,
) -> LinearModel:
    """Train the native baseline on labeled examples."""
    X = feature_matrix(examples)
    y = _labels_to_y(examples)
    raw_w, raw_b = train_linear_on_matrix(
        X, y, epochs=epochs, learning_rate=learning_rate, seed=seed
    )
    return LinearModel(weights=tuple(float(v) for v in raw_w), bias=raw_b)


# --- CSV export -------------------------------------------------------------
# Column order: id, the eight feature names above, label (entail=0,
# contradict=1; blank when unlabeled). UTF-8, LF line endings.

def write_feature_csv(examples: Sequence[LabeledExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("id",) + FEATURE_NAMES + ("label",))
        for ex in examples:
            fv = extract_features(ex)
            label = "" if ex.label is None else str(int(ex.label is Label.CONTRADICT))
            writer.writerow([ex.id, *(repr(v) if isinstance(v, float) else v for v in fv.as_tuple()), label])


def read_feature_csv(path: str | Path) -> list[tuple[str, FeatureVector, Label | None]]:
    rows = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            fv = FeatureVector(
                headline_len_tokens=int(row["headline_len_tokens"]),
                article_len_tokens=int(row["article_len_tokens"]),
                headline_len_chars=int(row["headline_len_chars"]),
                article_len_chars=int(row["article_len_chars"]),
                overlap_word_count=int(row["overlap_word_count"]),
                overlap_word_ratio=float(row["overlap_word_ratio"]),
                jaro_winkler_tokens=float(row["jaro_winkler_tokens"]),
                jaro_winkler_chars_title=float(row["jaro_winkler_chars_title"]),
            )
            label = None
            if row["label"] != "":
                label = Label.CONTRADICT if row["label"] == "1" else Label.ENTAIL
            rows.append((row["id"], fv, label))
    return rows
