"""Classification metrics, development-set threshold tuning, and paired
significance testing.

The positive class is CONTRADICT (hallucinated) everywhere; corpora with
inverted polarity are normalized at ingestion, never here. Threshold
tuning sweeps midpoints between consecutive distinct scores, which makes
it exact and deterministic; dense grids belong in test oracles only.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

from .core import Label
from .errors import DataError, EmptyInput, LengthMismatch, TooFewRuns


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    threshold_used: float
    n: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "threshold_used": self.threshold_used,
            "n": self.n,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render_table(self) -> str:
        """Aligned text table in Accuracy/Precision/Recall/F1 column order."""
        headers = ("Accuracy", "Precision", "Recall", "F1")
        values = (self.accuracy, self.precision, self.recall, self.f1)
        cells = [f"{v * 100:.2f}" for v in values]
        widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
        head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        row = "  ".join(c.rjust(w) for c, w in zip(cells, widths))
        extra = (
            f"n={self.n}  threshold={self.threshold_used:g}  "
            f"tp={self.tp} fp={self.fp} tn={self.tn} fn={self.fn}"
        )
        return f"{head}\n{row}\n{extra}"


def compute_metrics(
    scores: Sequence[float],
    labels: Sequence[Label],
    threshold: float,
) -> EvalReport:
    """Confusion counts and Accuracy/P/R/F1 with CONTRADICT as positive.

    Prediction is CONTRADICT iff score >= threshold. Zero-denominator
    conventions: precision is 0 when nothing is flagged, recall is 0 when
    nothing is positive, F1 is 0 when P and R are both 0.
    """
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    if not scores:
        raise EmptyInput("compute_metrics needs at least one example")
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise DataError(f"score {s!r} outside [0, 1]")

    tp = fp = tn = fn = 0
    for score, label in zip(scores, labels):
        flagged = score >= threshold
        positive = label is Label.CONTRADICT
        if flagged and positive:
            tp += 1
        elif flagged and not positive:
            fp += 1
        elif not flagged and positive:
            fn += 1
        else:
            tn += 1

    n = len(scores)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        accuracy=(tp + tn) / n,
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        threshold_used=threshold,
        n=n,
    )


class Objective(enum.Enum):
    ACCURACY = "accuracy"
    F1 = "f1"


def tune_threshold(
    dev_scores: Sequence[float],
    dev_labels: Sequence[Label],
    objective: Objective = Objective.ACCURACY,
) -> float:
    """Binary cutoff maximizing the objective on a development split.

    Candidates are 0, 1, and midpoints between consecutive distinct sorted
    scores; ties break toward the smallest threshold (favoring recall).
    """
    if len(dev_scores) != len(dev_labels):
        raise LengthMismatch(f"{len(dev_scores)} scores vs {len(dev_labels)} labels")
    if not dev_scores:
        raise EmptyInput("tune_threshold needs at least one example")

    distinct = sorted(set(dev_scores))
    candidates = [0.0]
    candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    candidates.append(1.0)

    best_threshold = 0.0
    best_value = -1.0
    for threshold in sorted(candidates):
        report = compute_metrics(dev_scores, dev_labels, threshold)
        value = report.accuracy if objective is Objective.ACCURACY else report.f1
        if value > best_value:
            best_value = value
            best_threshold = threshold
    return best_threshold


@dataclass(frozen=True)
class SignificanceResult:
    t_statistic: float
    degrees_of_freedom: int
    significant_at_95: bool


def paired_t_test(runs_a: Sequence[float], runs_b: Sequence[float]) -> SignificanceResult:
    """Two-tailed paired t-test at the 95% confidence level.

    t = mean(d) * sqrt(n) / sd(d) with the sample standard deviation.
    Degenerate cases: all-zero differences give t=0 (not significant); a
    constant nonzero difference gives signed infinity (significant).
    """
    if len(runs_a) != len(runs_b):
        raise LengthMismatch(f"{len(runs_a)} runs vs {len(runs_b)} runs")
    n = len(runs_a)
    if n < 2:
        raise TooFewRuns("paired t-test needs at least two runs")

    diffs = [a - b for a, b in zip(runs_a, runs_b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    df = n - 1

    if sd == 0.0:
        if mean == 0.0:
            return SignificanceResult(t_statistic=0.0, degrees_of_freedom=df, significant_at_95=False)
        t = math.inf if mean > 0 else -math.inf
        return SignificanceResult(t_statistic=t, degrees_of_freedom=df, significant_at_95=True)

    t = mean * math.sqrt(n) / sd
    return SignificanceResult(
        t_statistic=t,
        degrees_of_freedom=df,
        significant_at_95=abs(t) > critical_value_95(df),
    )


def critical_value_95(df: int) -> float:
    """Two-tailed 5% critical value of Student's t for the given degrees
    of freedom; normal approximation beyond the embedded table."""
    if df < 1:
        raise DataError(f"degrees of freedom must be >= 1, got {df}")
    if df > len(_T_CRITICAL_95):
        return 1.96
    return _T_CRITICAL_95[df - 1]


# Two-tailed alpha=0.05 critical values for df = 1..200.
_T_CRITICAL_95: tuple[float, ...] = (
    12.706204736, 4.302652730, 3.182446305, 2.776445105, 2.570581836,
    2.446911851, 2.364624252, 2.306004135, 2.262157163, 2.228138852,
    2.200985160, 2.178812830, 2.160368656, 2.144786688, 2.131449546,
    2.119905299, 2.109815578, 2.100922040, 2.093024054, 2.085963447,
    2.079613845, 2.073873068, 2.068657610, 2.063898562, 2.059538553,
    2.055529439, 2.051830516, 2.048407142, 2.045229642, 2.042272456,
    2.039513446, 2.036933343, 2.034515297, 2.032244509, 2.030107928,
    2.028094001, 2.026192463, 2.024394164, 2.022690920, 2.021075390,
    2.019540970, 2.018081703, 2.016692199, 2.015367574, 2.014103389,
    2.012895599, 2.011740514, 2.010634758, 2.009575237, 2.008559112,
    2.007583770, 2.006646805, 2.005745995, 2.004879288, 2.004044783,
    2.003240719, 2.002465459, 2.001717484, 2.000995378, 2.000297822,
    1.999623585, 1.998971517, 1.998340543, 1.997729654, 1.997137908,
    1.996564419, 1.996008354, 1.995468931, 1.994945415, 1.994437112,
    1.993943368, 1.993463567, 1.992997126, 1.992543495, 1.992102154,
    1.991672610, 1.991254395, 1.990847069, 1.990450210, 1.990063421,
    1.989686323, 1.989318557, 1.988959780, 1.988609667, 1.988267907,
    1.987934206, 1.987608282, 1.987289865, 1.986978700, 1.986674541,
    1.986377154, 1.986086317, 1.985801814, 1.985523442, 1.985251004,
    1.984984312, 1.984723186, 1.984467454, 1.984216952, 1.983971518,
    1.983731003, 1.983495258, 1.983264145, 1.983037526, 1.982815274,
    1.982597262, 1.982383370, 1.982173483, 1.981967490, 1.981765282,
    1.981566757, 1.981371815, 1.981180359, 1.980992298, 1.980807541,
    1.980626002, 1.980447599, 1.980272249, 1.980099876, 1.979930405,
    1.979763762, 1.979599878, 1.979438685, 1.979280117, 1.979124109,
    1.978970602, 1.978819535, 1.978670850, 1.978524491, 1.978380405,
    1.978238539, 1.978098842, 1.977961264, 1.977825758, 1.977692277,
    1.977560777, 1.977431212, 1.977303542, 1.977177724, 1.977053720,
    1.976931489, 1.976810994, 1.976692198, 1.976575066, 1.976459563,
    1.976345655, 1.976233309, 1.976122494, 1.976013178, 1.975905331,
    1.975798924, 1.975693928, 1.975590315, 1.975488058, 1.975387131,
    1.975287508, 1.975189163, 1.975092073, 1.974996213, 1.974901560,
    1.974808092, 1.974715786, 1.974624621, 1.974534576, 1.974445630,
    1.974357764, 1.974270957, 1.974185191, 1.974100447, 1.974016708,
    1.973933954, 1.973852169, 1.973771337, 1.973691440, 1.973612462,
    1.973534388, 1.973457202, 1.973380889, 1.973305434, 1.973230823,
    1.973157042, 1.973084077, 1.973011915, 1.972940542, 1.972869946,
    1.972800114, 1.972731033, 1.972662692, 1.972595079, 1.972528182,
    1.972461990, 1.972396491, 1.972331676, 1.972267533, 1.972204051,
    1.972141222, 1.972079034, 1.972017478, 1.971956544, 1.971896224,
)
