"""Headline hallucination detection toolkit.

Detects whether a generated news headline is supported by its source
article using a two-stage entailment pipeline over any text-to-text
backend, and produces the explanation-augmented training corpora those
components are trained on. Ships a deterministic mock backend, dataset
adapters, a handcrafted-feature baseline, an evaluation harness, and
scikit-learn estimator wrappers.
"""

from .augment import (
    AugmentationConfig,
    NeutralPolicy,
    TrainingRecord,
    adapt_nli_example,
    augment_with_explainer,
    emit_training_records,
)
from .backends import (
    GenerationMode,
    GenerationRequest,
    GenerationResult,
    HttpBackend,
    MockBackend,
    MockBackendSpec,
    Normalization,
    class_probability,
)
from .core import (
    Article,
    ArticleLayout,
    ExampleOrigin,
    Explanation,
    Headline,
    Label,
    LabeledExample,
    Prediction,
    PredictionMode,
    article_text,
    label_from_token,
)
from .evaluation import (
    EvalReport,
    Objective,
    SignificanceResult,
    compute_metrics,
    paired_t_test,
    tune_threshold,
)
from .features import FeatureVector, LinearModel, extract_features, jaro_winkler, train_linear
from .pipeline import PipelineConfig, ScoreFailure, combine, score, score_batch
from .sklearn_api import BaselineLinearClassifier, HallucinationDetector, PairFeaturizer
from .templates import (
    ComponentKind,
    TemplateConfig,
    parse_component_output,
    render_explainer_input,
    render_hinted_input,
    render_reasoning_input,
    render_reasoning_target,
)

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ArticleLayout",
    "AugmentationConfig",
    "BaselineLinearClassifier",
    "ComponentKind",
    "EvalReport",
    "ExampleOrigin",
    "Explanation",
    "FeatureVector",
    "GenerationMode",
    "GenerationRequest",
    "GenerationResult",
    "HallucinationDetector",
    "Headline",
    "HttpBackend",
    "Label",
    "LabeledExample",
    "LinearModel",
    "MockBackend",
    "MockBackendSpec",
    "NeutralPolicy",
    "Normalization",
    "Objective",
    "PairFeaturizer",
    "PipelineConfig",
    "Prediction",
    "PredictionMode",
    "ScoreFailure",
    "SignificanceResult",
    "TemplateConfig",
    "TrainingRecord",
    "adapt_nli_example",
    "article_text",
    "augment_with_explainer",
    "class_probability",
    "combine",
    "compute_metrics",
    "emit_training_records",
    "extract_features",
    "jaro_winkler",
    "label_from_token",
    "paired_t_test",
    "parse_component_output",
    "render_explainer_input",
    "render_hinted_input",
    "render_reasoning_input",
    "render_reasoning_target",
    "score",
    "score_batch",
    "train_linear",
    "tune_threshold",
]
