import pytest
from hypothesis import given
from hypothesis import strategies as st

from halldet.core import (
    Article,
    ArticleLayout,
    Explanation,
    Headline,
    Label,
    LabeledExample,
    Prediction,
    PredictionMode,
    article_text,
    label_from_token,
)
from halldet.errors import DataError, UnknownClassToken


class TestLabel:
    def test_exactly_two_values(self):
        assert {label.value for label in Label} == {"entail", "contradict"}

    def test_token_mapping(self):
        assert label_from_token("Contradict") is Label.CONTRADICT
        assert label_from_token("entail") is Label.ENTAIL

    def test_trims_and_ignores_case(self):
        assert label_from_token("  CONTRADICT  ") is Label.CONTRADICT

    def test_unknown_token(self):
        with pytest.raises(UnknownClassToken):
            label_from_token("maybe")

    def test_custom_tokens(self):
        tokens = {Label.ENTAIL: "e", Label.CONTRADICT: "c"}
        assert label_from_token("c", tokens) is Label.CONTRADICT
        with pytest.raises(UnknownClassToken):
            label_from_token("Contradict", tokens)

    @given(st.sampled_from(list(Label)))
    def test_round_trip_through_default_tokens(self, label):
        from halldet.core import DEFAULT_CLASS_TOKENS

        assert label_from_token(DEFAULT_CLASS_TOKENS[label]) is label


class TestArticleText:
    def test_title_passage(self):
        art = Article(title="T", body="B")
        assert article_text(art, ArticleLayout.TITLE_PASSAGE) == "title: T passage: B"

    def test_title_passage_omits_missing_title(self):
        art = Article(body="B")
        assert article_text(art, ArticleLayout.TITLE_PASSAGE) == "passage: B"

    def test_title_passage_omits_missing_body(self):
        art = Article(title="T")
        assert article_text(art, ArticleLayout.TITLE_PASSAGE) == "title: T"

    def test_concatenate(self):
        art = Article(title="T", body="B")
        assert article_text(art, ArticleLayout.CONCATENATE) == "T\nB"

    def test_concatenate_single_part(self):
        assert article_text(Article(body="B"), ArticleLayout.CONCATENATE) == "B"

    def test_layout_defaults_to_articles_own(self):
        art = Article(body="B", layout=ArticleLayout.CONCATENATE)
        assert article_text(art) == "B"

    def test_empty_article_rejected(self):
        with pytest.raises(DataError):
            Article(title="  ", body="")


class TestHeadline:
    def test_trims(self):
        assert Headline("  H  ").text == "H"

    def test_rejects_whitespace_only(self):
        with pytest.raises(DataError):
            Headline("   ")


class TestLabeledExample:
    def test_explanation_requires_label(self):
        with pytest.raises(DataError):
            LabeledExample(
                id="x",
                article=Article(body="B"),
                headline=Headline("H"),
                explanation=Explanation("E"),
            )

    def test_empty_explanation_is_legal(self):
        ex = LabeledExample(
            id="x",
            article=Article(body="B"),
            headline=Headline("H"),
            label=Label.ENTAIL,
            explanation=Explanation(""),
        )
        assert ex.explanation is not None and not ex.explanation


class TestPrediction:
    def test_probability_bounds(self):
        with pytest.raises(DataError):
            Prediction(
                hallucination_prob=1.5,
                label=Label.CONTRADICT,
                explanation=Explanation(""),
                mode=PredictionMode.NO_HINTED,
                reasoning_prob=0.5,
            )

    def test_full_mode_requires_both_subscores(self):
        with pytest.raises(DataError):
            Prediction(
                hallucination_prob=0.5,
                label=Label.CONTRADICT,
                explanation=Explanation(""),
                mode=PredictionMode.FULL,
                reasoning_prob=0.5,
                hinted_prob=None,
            )

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_valid_probability_accepted(self, p):
        pred = Prediction(
            hallucination_prob=p,
            label=Label.CONTRADICT if p >= 0.5 else Label.ENTAIL,
            explanation=Explanation(""),
            mode=PredictionMode.NO_HINTED,
            reasoning_prob=p,
        )
        assert 0.0 <= pred.hallucination_prob <= 1.0
