"""Scikit-learn estimator wrappers so the detector and baselines compose
with the wider ecosystem (pipelines, grid search, cross-validation).

``PairFeaturizer`` turns example sequences into feature matrices;
``BaselineLinearClassifier`` is the native seeded logistic baseline over
such matrices; ``HallucinationDetector`` wraps the two-stage inference
pipeline as a classifier whose ``fit`` tunes the decision threshold on a
development split. Class encoding everywhere: 0 = entail, 1 = contradict
(hallucinated).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .backends.base import Backend, Normalization
from .core import Label, LabeledExample, Prediction, PredictionMode
from .errors import DataError
from .evaluation import Objective, tune_threshold
from .features import FEATURE_NAMES, feature_matrix, train_linear_on_matrix
from .pipeline import PipelineConfig, ScoreFailure, score_batch
from .templates import TemplateConfig


def _validate_examples(X: Sequence[LabeledExample]) -> list[LabeledExample]:
    examples = list(X)
    for i, ex in enumerate(examples):
        if not isinstance(ex, LabeledExample):
            raise DataError(f"X[{i}] is {type(ex).__name__}, expected LabeledExample")
    return examples


def _validate_y(y, n: int) -> np.ndarray:
    values = []
    for item in y:
        if isinstance(item, Label):
            values.append(1.0 if item is Label.CONTRADICT else 0.0)
        elif item in (0, 1):
            values.append(float(item))
        else:
            raise DataError(f"label {item!r} must be a Label or 0/1")
    if len(values) != n:
        raise DataError(f"{len(values)} labels for {n} examples")
    return np.asarray(values)


class PairFeaturizer(BaseEstimator, TransformerMixin):
    """Stateless transformer from examples to the handcrafted feature
    matrix (columns in FEATURE_NAMES order)."""

    def fit(self, X: Sequence[LabeledExample], y=None) -> "PairFeaturizer":
        _validate_examples(X)
        return self

    def transform(self, X: Sequence[LabeledExample]) -> np.ndarray:
        return feature_matrix(_validate_examples(X))

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(FEATURE_NAMES, dtype=object)


class BaselineLinearClassifier(BaseEstimator, ClassifierMixin):
    """Seeded logistic-regression baseline over precomputed features."""

    def __init__(self, epochs: int = 500, learning_rate: float = 0.5, seed: int = 0):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed

    def fit(self, X, y) -> "BaselineLinearClassifier":
        X = np.asarray(X, dtype=float)
        y_arr = _validate_y(y, X.shape[0])
        weights, bias = train_linear_on_matrix(
            X, y_arr, epochs=self.epochs, learning_rate=self.learning_rate, seed=self.seed
        )
        self.coef_ = weights
        self.intercept_ = bias
        self.classes_ = np.array([0, 1])
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "coef_"):
            raise NotFittedError("call fit before predicting")

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        z = X @ self.coef_ + self.intercept_
        p = 1.0 / (1.0 + np.exp(-z))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


class HallucinationDetector(BaseEstimator, ClassifierMixin):
    """The two-stage detection pipeline behind a classifier interface.

    ``fit`` is cheap: with labels it tunes the decision threshold on the
    given examples (a development split), without labels it keeps the
    configured threshold. ``predictions`` exposes the full per-example
    verdicts including explanations.
    """

    def __init__(
        self,
        backend: Backend | None = None,
        mode: PredictionMode = PredictionMode.FULL,
        threshold: float = 0.5,
        normalization: Normalization = Normalization.RENORMALIZED_PAIR,
        template: TemplateConfig | None = None,
        seed: int | None = None,
        tune_objective: Objective = Objective.ACCURACY,
        concurrency: int | None = None,
    ):
        self.backend = backend
        self.mode = mode
        self.threshold = threshold
        self.normalization = normalization
        self.template = template
        self.seed = seed
        self.tune_objective = tune_objective
        self.concurrency = concurrency

    def _config(self, threshold: float) -> PipelineConfig:
        return PipelineConfig(
            mode=self.mode,
            threshold=threshold,
            normalization=self.normalization,
            template=self.template if self.template is not None else TemplateConfig(),
            seed=self.seed,
        )

    def _score(self, X: Sequence[LabeledExample], threshold: float) -> list[Prediction]:
        if self.backend is None:
            raise DataError("HallucinationDetector needs a backend")
        items = score_batch(
            _validate_examples(X),
            self.backend,
            self._config(threshold),
            concurrency=self.concurrency,
        )
        failures = [item for item in items if isinstance(item, ScoreFailure)]
        if failures:
            first = failures[0]
            raise DataError(
                f"{len(failures)} example(s) failed to score; first: "
                f"{first.example_id}: {first.message}"
            )
        return items  # type: ignore[return-value]

    def fit(self, X: Sequence[LabeledExample], y=None) -> "HallucinationDetector":
        if y is None:
            self.threshold_ = self.threshold
            return self
        examples = _validate_examples(X)
        y_arr = _validate_y(y, len(examples))
        scores = [p.hallucination_prob for p in self._score(examples, self.threshold)]
        labels = [Label.CONTRADICT if v == 1.0 else Label.ENTAIL for v in y_arr]
        self.threshold_ = tune_threshold(scores, labels, self.tune_objective)
        self.classes_ = np.array([0, 1])
        return self

    def _effective_threshold(self) -> float:
        return getattr(self, "threshold_", self.threshold)

    def predictions(self, X: Sequence[LabeledExample]) -> list[Prediction]:
        """Full per-example verdicts (probabilities, labels, explanations)."""
        return self._score(X, self._effective_threshold())

    def predict_proba(self, X: Sequence[LabeledExample]) -> np.ndarray:
        p = np.array([pred.hallucination_prob for pred in self.predictions(X)])
        return np.column_stack([1.0 - p, p])

    def predict(self, X: Sequence[LabeledExample]) -> np.ndarray:
        threshold = self._effective_threshold()
        probs = self.predict_proba(X)[:, 1]
        return (probs >= threshold).astype(int)
