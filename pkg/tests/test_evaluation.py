import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from halldet.core import Label
from halldet.errors import DataError, EmptyInput, LengthMismatch, TooFewRuns
from halldet.evaluation import (
    Objective,
    compute_metrics,
    critical_value_95,
    paired_t_test,
    tune_threshold,
)

C, E = Label.CONTRADICT, Label.ENTAIL


def confusion_oracle(scores, labels, threshold):
    """Independent brute-force confusion counting."""
    tp = sum(1 for s, l in zip(scores, labels) if s >= threshold and l is C)
    fp = sum(1 for s, l in zip(scores, labels) if s >= threshold and l is E)
    fn = sum(1 for s, l in zip(scores, labels) if s < threshold and l is C)
    tn = sum(1 for s, l in zip(scores, labels) if s < threshold and l is E)
    return tp, fp, tn, fn


class TestComputeMetrics:
    def test_hand_enumerated_example(self):
        report = compute_metrics([0.9, 0.2, 0.8, 0.1], [C, E, E, C], 0.5)
        assert (report.tp, report.fp, report.fn, report.tn) == (1, 1, 1, 1)
        assert report.accuracy == 0.5
        assert report.precision == 0.5
        assert report.recall == 0.5
        assert report.f1 == 0.5

    def test_perfect_classifier(self):
        report = compute_metrics([1.0, 1.0, 0.0], [C, C, E], 0.5)
        assert report.accuracy == report.precision == report.recall == report.f1 == 1.0

    def test_zero_denominator_conventions(self):
        report = compute_metrics([0.0, 0.0], [E, E], 0.5)
        assert report.accuracy == 1.0
        assert report.precision == 0.0
        assert report.recall == 0.0
        assert report.f1 == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            compute_metrics([0.5], [C, E], 0.5)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            compute_metrics([], [], 0.5)

    def test_score_out_of_range(self):
        with pytest.raises(DataError):
            compute_metrics([1.5], [C], 0.5)

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0, max_value=1), st.sampled_from([C, E])
            ),
            min_size=1,
            max_size=20,
        ),
        st.floats(min_value=0, max_value=1),
    )
    @settings(max_examples=400)
    def test_matches_brute_force_oracle(self, pairs, threshold):
        scores = [p[0] for p in pairs]
        labels = [p[1] for p in pairs]
        report = compute_metrics(scores, labels, threshold)
        tp, fp, tn, fn = confusion_oracle(scores, labels, threshold)
        assert (report.tp, report.fp, report.tn, report.fn) == (tp, fp, tn, fn)
        assert report.tp + report.fp + report.tn + report.fn == report.n
        assert report.accuracy == (tp + tn) / len(scores)

    @given(
        st.lists(
            st.tuples(st.floats(min_value=0, max_value=1), st.sampled_from([C, E])),
            min_size=2,
            max_size=15,
        ),
        st.randoms(),
    )
    @settings(max_examples=200)
    def test_permutation_invariance(self, pairs, rng):
        scores = [p[0] for p in pairs]
        labels = [p[1] for p in pairs]
        before = compute_metrics(scores, labels, 0.5)
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        after = compute_metrics([p[0] for p in shuffled], [p[1] for p in shuffled], 0.5)
        assert before == after

    def test_f1_between_p_and_r_when_nonzero(self):
        report = compute_metrics([0.9, 0.9, 0.1, 0.9], [C, E, C, C], 0.5)
        assert min(report.precision, report.recall) <= report.f1 <= max(
            report.precision, report.recall
        )


def grid_sweep_oracle(scores, labels, objective, step=1e-3):
    """Exhaustive dense-grid sweep; returns the best objective value."""
    best = -1.0
    k = 0
    while True:
        threshold = min(k * step, 1.0)
        report = compute_metrics(scores, labels, threshold)
        value = report.accuracy if objective is Objective.ACCURACY else report.f1
        best = max(best, value)
        if threshold >= 1.0:
            return best
        k += 1


def objective_value(scores, labels, threshold, objective):
    report = compute_metrics(scores, labels, threshold)
    return report.accuracy if objective is Objective.ACCURACY else report.f1


class TestTuneThreshold:
    def test_clean_separation(self):
        threshold = tune_threshold([0.2, 0.4, 0.6, 0.8], [E, E, C, C], Objective.ACCURACY)
        assert threshold == 0.5
        assert objective_value([0.2, 0.4, 0.6, 0.8], [E, E, C, C], threshold, Objective.ACCURACY) == 1.0

    def test_all_contradict_flags_everything(self):
        assert tune_threshold([0.3, 0.6], [C, C], Objective.ACCURACY) == 0.0

    def test_single_example(self):
        assert tune_threshold([0.7], [C], Objective.ACCURACY) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            tune_threshold([], [], Objective.ACCURACY)

    def test_tie_breaks_toward_smaller_threshold(self):
        # inverted scores: flag-everything and flag-nothing both score 0.5
        # accuracy while the midpoint scores 0; the smaller candidate wins
        scores = [0.2, 0.8]
        labels = [C, E]
        assert tune_threshold(scores, labels, Objective.ACCURACY) == 0.0

    @pytest.mark.parametrize("objective", [Objective.ACCURACY, Objective.F1])
    def test_matches_grid_sweep_oracle(self, objective):
        rng = random.Random(7)
        for _ in range(60):
            n = rng.randint(1, 25)
            # scores on a 0.01 lattice so the 1e-3 grid hits every midpoint
            scores = [round(rng.randint(0, 100) / 100, 2) for _ in range(n)]
            labels = [rng.choice([C, E]) for _ in range(n)]
            threshold = tune_threshold(scores, labels, objective)
            got = objective_value(scores, labels, threshold, objective)
            assert got == pytest.approx(grid_sweep_oracle(scores, labels, objective), abs=1e-12)

    @given(
        st.lists(
            st.tuples(st.floats(min_value=0, max_value=1), st.sampled_from([C, E])),
            min_size=1,
            max_size=12,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_never_worse_than_any_grid_point(self, pairs):
        scores = [p[0] for p in pairs]
        labels = [p[1] for p in pairs]
        threshold = tune_threshold(scores, labels, Objective.F1)
        best = objective_value(scores, labels, threshold, Objective.F1)
        for k in range(0, 11):
            assert best >= objective_value(scores, labels, k / 10, Objective.F1) - 1e-12

    def test_raising_threshold_never_increases_recall(self):
        rng = random.Random(3)
        scores = [rng.random() for _ in range(30)]
        labels = [rng.choice([C, E]) for _ in range(30)]
        recalls = [
            compute_metrics(scores, labels, t / 20).recall for t in range(21)
        ]
        assert all(a >= b for a, b in zip(recalls, recalls[1:]))


class TestPairedTTest:
    def test_identical_runs(self):
        result = paired_t_test([0.8, 0.82, 0.81], [0.8, 0.82, 0.81])
        assert result.t_statistic == 0.0
        assert not result.significant_at_95
        assert result.degrees_of_freedom == 2

    def test_constant_positive_difference(self):
        a = [0.85, 0.86, 0.84, 0.87, 0.85]
        b = [x - 0.05 for x in a]
        result = paired_t_test(a, b)
        assert math.isinf(result.t_statistic) and result.t_statistic > 0
        assert result.significant_at_95

    def test_textbook_example_matches_scipy(self):
        a = [0.84, 0.85, 0.83, 0.86, 0.84]
        b = [0.82, 0.82, 0.83, 0.81, 0.82]
        result = paired_t_test(a, b)
        expected = stats.ttest_rel(a, b)
        assert result.t_statistic == pytest.approx(expected.statistic, abs=1e-9)
        assert result.significant_at_95 == (expected.pvalue < 0.05)

    @given(
        st.lists(st.floats(min_value=0, max_value=1), min_size=2, max_size=12),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=200)
    def test_antisymmetry(self, a, rng):
        b = [min(1.0, max(0.0, x + rng.uniform(-0.2, 0.2))) for x in a]
        forward = paired_t_test(a, b)
        backward = paired_t_test(b, a)
        assert forward.t_statistic == pytest.approx(-backward.t_statistic, abs=0)
        assert forward.significant_at_95 == backward.significant_at_95

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            paired_t_test([0.1, 0.2], [0.1])

    def test_too_few_runs(self):
        with pytest.raises(TooFewRuns):
            paired_t_test([0.5], [0.4])

    def test_critical_values_match_scipy(self):
        for df in (1, 2, 5, 30, 120, 200):
            assert critical_value_95(df) == pytest.approx(
                stats.t.ppf(0.975, df), abs=1e-6
            )
        assert critical_value_95(500) == 1.96


class TestEvalReport:
    def test_json_round_trip(self):
        report = compute_metrics([0.9, 0.2], [C, E], 0.5)
        data = json.loads(report.to_json())
        assert data["accuracy"] == 1.0 and data["n"] == 2

    def test_table_column_order(self):
        report = compute_metrics([0.9, 0.2, 0.8, 0.1], [C, E, E, C], 0.5)
        table = report.render_table()
        header = table.splitlines()[0]
        assert header.index("Accuracy") < header.index("Precision") < header.index(
            "Recall"
        ) < header.index("F1")
