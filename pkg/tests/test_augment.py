import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halldet.augment import (
    AugmentationConfig,
    NeutralPolicy,
    adapt_nli_example,
    augment_with_explainer,
    emit_training_records,
    nli_label,
    read_training_records,
    write_training_records,
    write_training_records_tsv,
)
from halldet.backends.base import GenerationResult, ScoredOutput
from halldet.backends.mock import MockBackend, MockBackendSpec, MockFallback
from halldet.core import (
    Article,
    ArticleLayout,
    ExampleOrigin,
    Explanation,
    Headline,
    Label,
    LabeledExample,
)
from halldet.errors import DataError, UnsupportedLabel
from halldet.templates import ComponentKind, render_explainer_input

PREMISE = "A man with a beige jacket carries a water jug and pushes a food cart."
HYPOTHESIS = "A man pushes a cart"


def labeled(id="x", headline="H", body="A", explanation=None, label=Label.CONTRADICT):
    return LabeledExample(
        id=id,
        article=Article(body=body, layout=ArticleLayout.CONCATENATE),
        headline=Headline(headline),
        label=label,
        explanation=Explanation(explanation) if explanation is not None else None,
    )


class TestNliLabel:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("entailment", Label.ENTAIL),
            ("e", Label.ENTAIL),
            ("contradiction", Label.CONTRADICT),
            ("c", Label.CONTRADICT),
            ("CONTRADICTION", Label.CONTRADICT),
        ],
    )
    def test_known_labels(self, raw, expected):
        assert nli_label(raw) is expected

    def test_neutral_rejected_by_default(self):
        with pytest.raises(UnsupportedLabel):
            nli_label("neutral")

    def test_neutral_mapped_when_configured(self):
        assert nli_label("neutral", NeutralPolicy.MAP_TO_CONTRADICT) is Label.CONTRADICT

    def test_garbage_label(self):
        with pytest.raises(UnsupportedLabel):
            nli_label("sideways")


class TestAdaptNliExample:
    def test_hypothesis_becomes_headline(self):
        ex = adapt_nli_example(PREMISE, HYPOTHESIS, Label.ENTAIL, ["he pushes a food cart"])
        assert ex.headline.text == "A man pushes a cart"
        assert ex.article.body == PREMISE
        assert ex.article.title == ""
        assert ex.article.layout is ArticleLayout.CONCATENATE
        assert ex.label is Label.ENTAIL
        assert ex.explanation.text == "he pushes a food cart"
        assert ex.origin is ExampleOrigin.NLI_ADAPTED

    def test_neutral_item_raises(self):
        with pytest.raises(UnsupportedLabel):
            adapt_nli_example(PREMISE, HYPOTHESIS, "neutral")

    def test_empty_explanation_list(self):
        ex = adapt_nli_example(PREMISE, HYPOTHESIS, "entailment", [])
        assert ex.explanation is None

    def test_first_explanation_attached(self):
        ex = adapt_nli_example(PREMISE, HYPOTHESIS, "entailment", ["first", "second"])
        assert ex.explanation.text == "first"

    def test_empty_premise_rejected(self):
        with pytest.raises(DataError):
            adapt_nli_example("  ", HYPOTHESIS, "entailment")

    def test_deterministic_generated_id(self):
        a = adapt_nli_example(PREMISE, HYPOTHESIS, "entailment")
        b = adapt_nli_example(PREMISE, HYPOTHESIS, "entailment")
        assert a.id == b.id


def explain_backend(per_example: dict[str, list[str]], template=None):
    """Scripted explainer: maps an example id's explainer input to texts."""
    responses = {}
    for input_text, texts in per_example.items():
        responses[input_text] = GenerationResult(
            outputs=tuple(ScoredOutput(t, -1.0) for t in texts)
        )
    return MockBackend(MockBackendSpec(scripted_responses=responses, fallback=MockFallback.ERROR))


def explainer_key(ex):
    return render_explainer_input(ex, ex.label)


class TestAugmentWithExplainer:
    def test_size_arithmetic_without_collisions(self):
        examples = [labeled(id="a", headline="h one"), labeled(id="b", headline="h two")]
        backend = explain_backend(
            {
                explainer_key(examples[0]): ["e1", "e2", "e3"],
                explainer_key(examples[1]): ["f1", "f2", "f3"],
            }
        )
        out = augment_with_explainer(examples, backend, AugmentationConfig(k=3))
        assert len(out) == 8  # 2 * (1 + 3)

    def test_k_zero_is_identity(self):
        examples = [labeled(id="a")]
        backend = explain_backend({})  # would error if called
        out = augment_with_explainer(examples, backend, AugmentationConfig(k=0))
        assert out == examples

    def test_duplicate_generation_dropped(self):
        ex = labeled(id="a")
        backend = explain_backend({explainer_key(ex): ["same", "same", "other"]})
        out = augment_with_explainer([ex], backend, AugmentationConfig(k=3))
        assert len(out) == 3  # original + 2 distinct generations
        texts = [e.explanation.text for e in out[1:]]
        assert texts == ["same", "other"]

    def test_generation_equal_to_human_explanation_dropped(self):
        ex = labeled(id="a", explanation="human says so")
        backend = explain_backend({explainer_key(ex): ["human says so", "fresh"]})
        out = augment_with_explainer([ex], backend, AugmentationConfig(k=2))
        assert [e.explanation.text for e in out] == ["human says so", "fresh"]

    def test_no_dedupe_keeps_duplicates(self):
        ex = labeled(id="a")
        backend = explain_backend({explainer_key(ex): ["same", "same"]})
        out = augment_with_explainer([ex], backend, AugmentationConfig(k=2, dedupe=False))
        assert len(out) == 3

    def test_originals_unchanged_and_labels_preserved(self):
        examples = [
            labeled(id="a", headline="alpha beta", explanation="because alpha"),
            labeled(id="b", headline="gamma delta", label=Label.ENTAIL),
        ]
        backend = explain_backend(
            {
                explainer_key(examples[0]): ["x1", "x2"],
                explainer_key(examples[1]): ["y1", "y2"],
            }
        )
        out = augment_with_explainer(examples, backend, AugmentationConfig(k=2))
        assert out[0] == examples[0]
        assert out[3] == examples[1]
        for new in (out[1], out[2]):
            assert new.article == examples[0].article
            assert new.headline == examples[0].headline
            assert new.label is examples[0].label
            assert new.origin is ExampleOrigin.EXPLAINER_GENERATED
            assert new.id.startswith("a#aug")

    def test_backend_failure_keeps_example_unaugmented(self):
        ok = labeled(id="ok")
        broken = labeled(id="broken", headline="different headline")
        backend = explain_backend({explainer_key(ok): ["e1"]})  # broken is unscripted
        out = augment_with_explainer([ok, broken], backend, AugmentationConfig(k=1))
        assert [e.id for e in out] == ["ok", "ok#aug1", "broken"]

    def test_unlabeled_example_rejected(self):
        ex = LabeledExample(id="u", article=Article(body="B"), headline=Headline("H"))
        with pytest.raises(DataError):
            augment_with_explainer([ex], MockBackend(), AugmentationConfig(k=1))

    @given(st.integers(min_value=0, max_value=5), st.integers(min_value=1, max_value=8))
    @settings(max_examples=40, deadline=None)
    def test_output_size_bounds(self, k, n):
        examples = [labeled(id=f"e{i}", headline=f"headline {i}") for i in range(n)]
        backend = MockBackend()  # heuristic fallback generates k distinct
        out = augment_with_explainer(examples, backend, AugmentationConfig(k=k, seed=1))
        assert n <= len(out) <= n * (1 + k)
        originals = [e for e in out if e.origin is not ExampleOrigin.EXPLAINER_GENERATED]
        assert originals == examples


class TestEmitTrainingRecords:
    def test_full_component_set_with_explanation(self):
        ex = labeled(id="a", explanation="the dates differ")
        records = emit_training_records([ex])
        assert len(records) == 3
        by_kind = {r.component: r for r in records}
        reasoning = by_kind[ComponentKind.REASONING_CLASSIFIER]
        assert reasoning.target == "Contradict because the dates differ"
        hinted = by_kind[ComponentKind.HINTED_CLASSIFIER]
        assert hinted.input.endswith(" comment: the dates differ")
        assert hinted.target == "Contradict"
        explainer = by_kind[ComponentKind.EXPLAINER]
        assert explainer.target == "the dates differ"
        assert explainer.input.endswith(" Contradict because")

    def test_empty_explanation_yields_reasoning_only(self):
        ex = labeled(id="a", explanation="")
        records = emit_training_records([ex])
        assert len(records) == 1
        assert records[0].component is ComponentKind.REASONING_CLASSIFIER
        assert records[0].target == "Contradict"

    def test_missing_explanation_yields_reasoning_only(self):
        ex = labeled(id="a")
        records = emit_training_records([ex])
        assert len(records) == 1

    def test_explainer_target_never_contains_class_token(self):
        ex = labeled(id="a", explanation="no tokens here")
        records = emit_training_records([ex], [ComponentKind.EXPLAINER])
        assert not records[0].target.startswith("Contradict")

    def test_component_subset(self):
        ex = labeled(id="a", explanation="E")
        records = emit_training_records([ex], [ComponentKind.HINTED_CLASSIFIER])
        assert [r.component for r in records] == [ComponentKind.HINTED_CLASSIFIER]

    def test_inputs_respect_template_prefixes(self):
        ex = labeled(id="a", explanation="E")
        for record in emit_training_records([ex]):
            assert record.input.startswith("headline entailment: headline: ")

    def test_unlabeled_rejected(self):
        ex = LabeledExample(id="u", article=Article(body="B"), headline=Headline("H"))
        with pytest.raises(DataError):
            emit_training_records([ex])

    def test_origin_carried_through(self):
        ex = adapt_nli_example(PREMISE, HYPOTHESIS, "entailment", ["expl"])
        records = emit_training_records([ex])
        assert all(r.origin is ExampleOrigin.NLI_ADAPTED for r in records)

    def test_composition_keeps_human_records(self):
        examples = [
            labeled(id="a", headline="alpha beta", explanation="because alpha"),
            labeled(id="b", headline="gamma delta", label=Label.ENTAIL, explanation="ok"),
        ]
        backend = explain_backend(
            {
                explainer_key(examples[0]): ["x1", "x2"],
                explainer_key(examples[1]): ["y1"],
            }
        )
        augmented = augment_with_explainer(examples, backend, AugmentationConfig(k=2))
        base_records = emit_training_records(examples)
        augmented_records = emit_training_records(augmented)
        human = [r for r in augmented_records if r.origin is ExampleOrigin.HUMAN]
        assert sorted((r.input, r.target) for r in human) == sorted(
            (r.input, r.target) for r in base_records
        )


class TestTrainingRecordFiles:
    def test_jsonl_round_trip(self, tmp_path):
        records = emit_training_records([labeled(id="a", explanation="E because F")])
        path = tmp_path / "train.jsonl"
        write_training_records(records, path)
        assert read_training_records(path) == records

    def test_tsv_sanitizes_tabs_and_newlines(self, tmp_path):
        ex = labeled(id="a", explanation="line\tone\nline two")
        records = emit_training_records([ex], [ComponentKind.EXPLAINER])
        path = tmp_path / "train.tsv"
        write_training_records_tsv(records, path)
        content = path.read_text(encoding="utf-8")
        lines = content.splitlines()
        assert len(lines) == 1
        assert lines[0].count("\t") == 1


class TestAugmentationConfig:
    def test_defaults(self):
        assert AugmentationConfig().k == 3
        assert AugmentationConfig.pretraining().k == 1

    def test_negative_k_rejected(self):
        with pytest.raises(DataError):
            AugmentationConfig(k=-1)

    def test_dict_round_trip(self):
        cfg = AugmentationConfig(k=2, dedupe=False, seed=7)
        assert AugmentationConfig.from_dict(cfg.to_dict()) == cfg
