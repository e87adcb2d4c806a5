"""Corpus readers and writers.

The native on-disk schema is "pairs JSONL": one object per line with
``id``, ``article_title``, ``article_body``, ``headline`` and optional
``label``, ``explanation``, ``split``, ``source_id``, ``origin``,
``article_layout``. Adapters map NLI corpora (eSNLI CSV, ANLI JSONL) and
grounding-benchmark CSVs onto it; their polarity is normalized at
ingestion so CONTRADICT always means hallucinated downstream.

Reads are strict: the first malformed record aborts with a line-numbered
error rather than silently loading a partial corpus.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .augment import NeutralPolicy, adapt_nli_example
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
)
from .errors import DataError, LengthMismatch, ParseError, UnknownFormat, UnsupportedLabel


class Split(enum.Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"
    UNSPLIT = "unsplit"


class DatasetFormat(enum.Enum):
    HHD_JSONL = "hhd_jsonl"
    ESNLI_CSV = "esnli_csv"
    ANLI_JSONL = "anli_jsonl"
    TRUE_CSV = "true_csv"

    @classmethod
    def from_string(cls, value: str) -> "DatasetFormat":
        aliases = {
            "hhd": cls.HHD_JSONL,
            "pairs": cls.HHD_JSONL,
            "esnli": cls.ESNLI_CSV,
            "anli": cls.ANLI_JSONL,
            "true": cls.TRUE_CSV,
        }
        key = value.strip().lower()
        if key in aliases:
            return aliases[key]
        for fmt in cls:
            if fmt.value == key:
                return fmt
        raise UnknownFormat(f"unknown dataset format {value!r}")


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    split: Split
    count: int
    positive_count: int
    with_explanation_count: int

    def __post_init__(self) -> None:
        if self.positive_count > self.count or self.with_explanation_count > self.count:
            raise DataError("manifest sub-counts exceed total count")

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "split": self.split.value,
            "count": self.count,
            "positive_count": self.positive_count,
            "with_explanation_count": self.with_explanation_count,
        }


def build_manifest(
    examples: Sequence[LabeledExample],
    name: str,
    split: Split = Split.UNSPLIT,
) -> DatasetManifest:
    return DatasetManifest(
        name=name,
        split=split,
        count=len(examples),
        positive_count=sum(1 for ex in examples if ex.label is Label.CONTRADICT),
        with_explanation_count=sum(1 for ex in examples if ex.explanation),
    )


#: Per-dataset polarity for grounding benchmarks: True means the flag
#: column says "grounded" (so a truthy flag maps to ENTAIL). New datasets
#: are data additions here, not code changes.
GROUNDING_FLAG_MEANS_GROUNDED: dict[str, bool] = {
    "mnbm": True,
    "frank": True,
    "qags": True,
    "summeval": True,
    "fever": True,
    "vitaminc": True,
}


def _normalize_dataset_name(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


@dataclass(frozen=True)
class TrueRecord:
    grounding: str
    target: str
    grounded_flag: bool
    dataset_name: str

    def to_example(self, id: str) -> LabeledExample:
        key = _normalize_dataset_name(self.dataset_name)
        if key not in GROUNDING_FLAG_MEANS_GROUNDED:
            known = ", ".join(sorted(GROUNDING_FLAG_MEANS_GROUNDED))
            raise DataError(f"unknown grounding dataset {self.dataset_name!r}; known: {known}")
        grounded = self.grounded_flag if GROUNDING_FLAG_MEANS_GROUNDED[key] else not self.grounded_flag
        return LabeledExample(
            id=id,
            article=Article(body=self.grounding, layout=ArticleLayout.CONCATENATE),
            headline=Headline(self.target),
            label=Label.ENTAIL if grounded else Label.CONTRADICT,
        )


def read_examples(
    path: str | Path,
    fmt: DatasetFormat,
    *,
    neutral_policy: NeutralPolicy = NeutralPolicy.REJECT,
    dataset_name: str | None = None,
    name: str | None = None,
) -> tuple[list[LabeledExample], DatasetManifest]:
    """Load a corpus file into labeled examples plus a manifest.

    ``neutral_policy`` governs three-way NLI labels (rejected items are
    skipped); ``dataset_name`` supplies the grounding-benchmark name when
    the CSV lacks a dataset column.
    """
    path = Path(path)
    if fmt is DatasetFormat.HHD_JSONL:
        pairs = _read_hhd_jsonl(path)
        examples = [ex for ex, _ in pairs]
        recorded = {split for _, split in pairs}
        split = recorded.pop() if len(recorded) == 1 and None not in recorded else None
    elif fmt is DatasetFormat.ESNLI_CSV:
        examples, split = _read_esnli_csv(path, neutral_policy), None
    elif fmt is DatasetFormat.ANLI_JSONL:
        examples, split = _read_anli_jsonl(path, neutral_policy), None
    elif fmt is DatasetFormat.TRUE_CSV:
        examples, split = _read_true_csv(path, dataset_name), None
    else:  # pragma: no cover - enum is exhaustive
        raise UnknownFormat(str(fmt))

    manifest = build_manifest(examples, name=name or path.stem, split=split or Split.UNSPLIT)
    return examples, manifest


def read_hhd_splits(path: str | Path) -> dict[Split, list[LabeledExample]]:
    """Group a native-schema corpus by its recorded splits. Records without
    a split land in UNSPLIT."""
    grouped: dict[Split, list[LabeledExample]] = {}
    for example, split in _read_hhd_jsonl(Path(path)):
        grouped.setdefault(split or Split.UNSPLIT, []).append(example)
    return grouped


def split_manifests(path: str | Path, name: str | None = None) -> dict[Split, DatasetManifest]:
    """Per-split manifests for a native-schema corpus file."""
    path = Path(path)
    name = name or path.stem
    return {
        split: build_manifest(members, name=f"{name}/{split.value}", split=split)
        for split, members in read_hhd_splits(path).items()
    }


def _fail(path: Path, line: int, message: str) -> ParseError:
    return ParseError(f"{path}:{line}: {message}")


def _read_hhd_jsonl(path: Path) -> list[tuple[LabeledExample, Split | None]]:
    pairs: list[tuple[LabeledExample, Split | None]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise _fail(path, lineno, f"invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise _fail(path, lineno, "record must be a JSON object")
            try:
                example = _hhd_record_to_example(record)
            except (DataError, KeyError, TypeError, ValueError) as exc:
                raise _fail(path, lineno, str(exc)) from exc
            split = None
            raw_split = record.get("split")
            if raw_split is not None:
                try:
                    split = Split(str(raw_split).strip().lower())
                except ValueError as exc:
                    raise _fail(path, lineno, f"unknown split {raw_split!r}") from exc
            pairs.append((example, split))
    return pairs


def _hhd_record_to_example(record: dict[str, Any]) -> LabeledExample:
    if "id" not in record:
        raise DataError("missing field 'id'")
    if "headline" not in record:
        raise DataError("missing field 'headline'")
    label = None
    if record.get("label") is not None:
        label = Label.from_string(str(record["label"]))
    explanation = None
    if record.get("explanation") is not None:
        if label is None:
            raise DataError("explanation present without a label")
        explanation = Explanation(str(record["explanation"]))
    layout = ArticleLayout.TITLE_PASSAGE
    if record.get("article_layout") is not None:
        layout = ArticleLayout(str(record["article_layout"]))
    origin = ExampleOrigin.HUMAN
    if record.get("origin") is not None:
        origin = ExampleOrigin(str(record["origin"]))
    return LabeledExample(
        id=str(record["id"]),
        article=Article(
            title=str(record.get("article_title") or ""),
            body=str(record.get("article_body") or ""),
            source_id=record.get("source_id"),
            layout=layout,
        ),
        headline=Headline(str(record["headline"])),
        label=label,
        explanation=explanation,
        origin=origin,
    )


def _read_esnli_csv(path: Path, neutral_policy: NeutralPolicy) -> list[LabeledExample]:
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        required = {"gold_label", "Sentence1", "Sentence2"}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise _fail(path, 1, f"missing columns: {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            explanations = [
                row[key] for key in ("Explanation_1", "Explanation_2", "Explanation_3")
                if row.get(key)
            ]
            try:
                examples.append(
                    adapt_nli_example(
                        premise=row["Sentence1"],
                        hypothesis=row["Sentence2"],
                        label=row["gold_label"],
                        explanations=explanations,
                        id=row.get("pairID") or f"esnli-{lineno}",
                        neutral_policy=neutral_policy,
                    )
                )
            except UnsupportedLabel:
                continue  # rejected neutral item
            except DataError as exc:
                raise _fail(path, lineno, str(exc)) from exc
    return examples


def _read_anli_jsonl(path: Path, neutral_policy: NeutralPolicy) -> list[LabeledExample]:
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise _fail(path, lineno, f"invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise _fail(path, lineno, "record must be a JSON object")
            reasons = record.get("reasons")
            if reasons is None:
                reasons = [record["reason"]] if record.get("reason") else []
            reasons = [r for r in reasons if str(r).strip()]
            base_id = str(record.get("uid") or f"anli-{lineno}")
            try:
                if reasons:
                    # one-to-three explanations become sibling examples
                    for i, reason in enumerate(reasons):
                        examples.append(
                            adapt_nli_example(
                                premise=record["premise"],
                                hypothesis=record["hypothesis"],
                                label=record["label"],
                                explanations=[str(reason)],
                                id=f"{base_id}#e{i}" if len(reasons) > 1 else base_id,
                                neutral_policy=neutral_policy,
                            )
                        )
                else:
                    examples.append(
                        adapt_nli_example(
                            premise=record["premise"],
                            hypothesis=record["hypothesis"],
                            label=record["label"],
                            id=base_id,
                            neutral_policy=neutral_policy,
                        )
                    )
            except UnsupportedLabel:
                continue
            except (DataError, KeyError, TypeError) as exc:
                raise _fail(path, lineno, str(exc)) from exc
    return examples


def _read_true_csv(path: Path, dataset_name: str | None) -> list[LabeledExample]:
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        fields = set(reader.fieldnames or ())
        if "grounding" not in fields:
            raise _fail(path, 1, "missing column 'grounding'")
        target_col = "target" if "target" in fields else "generated_text"
        if target_col not in fields:
            raise _fail(path, 1, "missing column 'target' (or 'generated_text')")
        flag_col = "grounded_flag" if "grounded_flag" in fields else "label"
        if flag_col not in fields:
            raise _fail(path, 1, "missing column 'label' (or 'grounded_flag')")
        dataset_col = next((c for c in ("dataset", "dataset_name") if c in fields), None)
        if dataset_col is None and dataset_name is None:
            raise _fail(path, 1, "no dataset column; pass dataset_name explicitly")
        for lineno, row in enumerate(reader, start=2):
            try:
                record = TrueRecord(
                    grounding=row["grounding"],
                    target=row[target_col],
                    grounded_flag=_parse_flag(row[flag_col]),
                    dataset_name=row[dataset_col] if dataset_col else dataset_name,  # type: ignore[arg-type]
                )
                examples.append(record.to_example(id=str(row.get("id") or f"true-{lineno}")))
            except DataError as exc:
                raise _fail(path, lineno, str(exc)) from exc
    return examples


def _parse_flag(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "grounded"):
        return True
    if value in ("0", "false", "no", "hallucinated"):
        return False
    raise DataError(f"cannot parse grounded flag {raw!r}")


def write_examples(
    examples: Sequence[LabeledExample],
    path: str | Path,
    splits: dict[str, Split] | None = None,
) -> None:
    """Write examples in the native pairs-JSONL schema (UTF-8, LF).

    ``splits`` optionally assigns splits by example id.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for ex in examples:
            record: dict[str, Any] = {
                "id": ex.id,
                "article_title": ex.article.title,
                "article_body": ex.article.body,
                "headline": ex.headline.text,
            }
            if ex.label is not None:
                record["label"] = ex.label.value
            if ex.explanation is not None:
                record["explanation"] = ex.explanation.text
            if ex.article.source_id is not None:
                record["source_id"] = ex.article.source_id
            if ex.article.layout is not ArticleLayout.TITLE_PASSAGE:
                record["article_layout"] = ex.article.layout.value
            if ex.origin is not ExampleOrigin.HUMAN:
                record["origin"] = ex.origin.value
            if splits and ex.id in splits:
                record["split"] = splits[ex.id].value
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


# --- predictions ------------------------------------------------------------

def prediction_to_record(prediction: Prediction, example_id: str) -> dict[str, Any]:
    """The prediction-line schema; single source of truth for writers."""
    record: dict[str, Any] = {
        "id": example_id,
        "hallucination_prob": prediction.hallucination_prob,
        "label": prediction.label.value,
        "explanation": prediction.explanation.text,
        "reasoning_prob": prediction.reasoning_prob,
        "hinted_prob": prediction.hinted_prob,
        "mode": prediction.mode.value,
    }
    if prediction.warnings:
        record["warnings"] = list(prediction.warnings)
    return record


def write_predictions(
    predictions: Sequence[Prediction],
    ids: Sequence[str],
    path: str | Path,
) -> None:
    """Prediction JSONL: one object per line with fields id,
    hallucination_prob, label, explanation, reasoning_prob, hinted_prob,
    mode (plus warnings when present). Floats keep full precision so the
    file rereads losslessly."""
    if len(predictions) != len(ids):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(ids)} ids")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pred, example_id in zip(predictions, ids):
            f.write(json.dumps(prediction_to_record(pred, example_id), ensure_ascii=False) + "\n")


def read_predictions(path: str | Path) -> list[tuple[str, Prediction]]:
    path = Path(path)
    out: list[tuple[str, Prediction]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if "error" in record:
                    continue  # failure entry from a batch run
                pred = Prediction(
                    hallucination_prob=float(record["hallucination_prob"]),
                    label=Label.from_string(record["label"]),
                    explanation=Explanation(record.get("explanation") or ""),
                    mode=PredictionMode(record["mode"]),
                    reasoning_prob=_opt_float(record.get("reasoning_prob")),
                    hinted_prob=_opt_float(record.get("hinted_prob")),
                    warnings=tuple(record.get("warnings", ())),
                )
                out.append((str(record["id"]), pred))
            except (DataError, KeyError, TypeError, ValueError) as exc:
                raise _fail(path, lineno, str(exc)) from exc
    return out


def read_scores(path: str | Path) -> list[tuple[str, float]]:
    """Lenient score reader: only id and hallucination_prob are required,
    so baseline prediction files evaluate with the same harness."""
    path = Path(path)
    out: list[tuple[str, float]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if "error" in record:
                    continue
                out.append((str(record["id"]), float(record["hallucination_prob"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise _fail(path, lineno, str(exc)) from exc
    return out


def _opt_float(value: Any) -> float | None:
    return None if value is None else float(value)
