"""Command-line surface binding the toolkit into user workflows.

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

The ``--backend`` option accepts an HTTP URL, the literal ``mock``
(deterministic heuristic backend, no server needed), or
``mock:<fixture.json>`` (scripted responses from a fixture file).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import data_io
from .augment import (
    AugmentationConfig,
    NeutralPolicy,
    augment_with_explainer,
    emit_training_records,
    write_training_records,
    write_training_records_tsv,
)
from .backends import HttpBackend, MockBackend, MockBackendSpec, MockFallback, make_server
from .backends.base import Backend, Normalization
from .backends.mock import load_scripted_fixture
from .config import CliConfig, load_config, write_run_metadata
from .core import Label, PredictionMode
from .errors import BackendError, DataError
from .evaluation import Objective, compute_metrics, paired_t_test, tune_threshold
from .features import LinearModel, train_linear, write_feature_csv
from .pipeline import PipelineConfig, ScoreFailure, score_batch
from .templates import ComponentKind

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


def _load_cli_config(config_path: str | None) -> CliConfig:
    return load_config(config_path) if config_path else CliConfig()


def _resolve_backend(spec: str, base: CliConfig) -> Backend:
    if spec == "mock":
        return MockBackend(template=base.template)
    if spec.startswith("mock:"):
        fixture = load_scripted_fixture(spec[len("mock:"):])
        return MockBackend(
            MockBackendSpec(scripted_responses=fixture), template=base.template
        )
    backend = HttpBackend(spec, max_concurrency=base.concurrency_limit)
    if not backend.health():
        raise BackendError(f"backend at {spec} failed its health check")
    return backend


def _pipeline_config(base: CliConfig, mode, threshold, seed, normalization) -> PipelineConfig:
    cfg = base.pipeline
    return PipelineConfig(
        mode=PredictionMode(mode) if mode else cfg.mode,
        threshold=threshold if threshold is not None else cfg.threshold,
        normalization=Normalization(normalization) if normalization else cfg.normalization,
        template=cfg.template,
        seed=seed if seed is not None else cfg.seed,
        max_output_tokens=cfg.max_output_tokens,
    )


@click.group()
def cli() -> None:
    """Headline hallucination detection toolkit."""


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--backend", "backend_spec", default=None, help="URL, 'mock', or 'mock:<fixture>'.")
@click.option("--mode", type=click.Choice([m.value for m in PredictionMode]), default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--normalization", type=click.Choice([n.value for n in Normalization]), default=None)
@click.option("--concurrency", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def score(in_path, out_path, backend_spec, mode, threshold, seed, normalization, concurrency, config_path) -> None:
    """Score pairs JSONL into a predictions JSONL file."""
    base = _load_cli_config(config_path)
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    backend = _resolve_backend(backend_spec or base.backend_url, base)
    cfg = _pipeline_config(base, mode, threshold, seed, normalization)
    limit = concurrency if concurrency is not None else base.concurrency_limit
    items = score_batch(examples, backend, cfg, concurrency=limit)

    failures = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        for example, item in zip(examples, items):
            if isinstance(item, ScoreFailure):
                failures += 1
                record = {"id": item.example_id, "error": item.message}
            else:
                record = data_io.prediction_to_record(item, example.id)
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    write_run_metadata(
        out_path,
        "score",
        {
            **base.to_dict(),
            "pipeline": cfg.to_dict(),
            "concurrency": limit,
            # the reasoning stage's probability comes from the first-token
            # class distribution of its classify_and_explain call
            "reasoning_prob_source": "classify_and_explain_first_token",
        },
    )
    if failures:
        click.echo(f"scored {len(items) - failures}/{len(items)} examples ({failures} failed)", err=True)
    else:
        click.echo(f"scored {len(items)} examples", err=True)


def _aligned_scores(pred_path: str, gold_path: str) -> tuple[list[float], list[Label]]:
    scored = dict(data_io.read_scores(pred_path))
    gold, _ = data_io.read_examples(gold_path, data_io.DatasetFormat.HHD_JSONL)
    scores: list[float] = []
    labels: list[Label] = []
    for ex in gold:
        if ex.label is None:
            raise DataError(f"gold example {ex.id!r} is unlabeled")
        if ex.id not in scored:
            raise DataError(f"no prediction for gold example {ex.id!r}")
        scores.append(scored[ex.id])
        labels.append(ex.label)
    return scores, labels


@cli.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", type=float, default=0.5, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def eval_cmd(pred_path, gold_path, threshold, as_json) -> None:
    """Evaluate predictions against gold labels."""
    scores, labels = _aligned_scores(pred_path, gold_path)
    report = compute_metrics(scores, labels, threshold)
    if as_json:
        payload = {"report": report.to_dict(), "config": {"threshold": threshold}}
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(report.render_table())


@cli.command("tune-threshold")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--objective", type=click.Choice([o.value for o in Objective]), default="accuracy", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def tune_threshold_cmd(pred_path, gold_path, objective, as_json) -> None:
    """Tune the binary cutoff on development predictions."""
    scores, labels = _aligned_scores(pred_path, gold_path)
    best = tune_threshold(scores, labels, Objective(objective))
    if as_json:
        report = compute_metrics(scores, labels, best)
        click.echo(json.dumps({"threshold": best, "report": report.to_dict()}, indent=2))
    else:
        click.echo(f"{best!r}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--backend", "backend_spec", default=None)
@click.option("--k", type=int, default=None, help="Generated explanations per example.")
@click.option("--seed", type=int, default=None)
@click.option("--dedupe/--no-dedupe", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def augment(in_path, out_path, backend_spec, k, seed, dedupe, config_path) -> None:
    """Augment labeled pairs with explainer-generated explanations."""
    base = _load_cli_config(config_path)
    aug = base.augmentation
    cfg = AugmentationConfig(
        k=k if k is not None else aug.k,
        dedupe=dedupe if dedupe is not None else aug.dedupe,
        seed=seed if seed is not None else aug.seed,
        neutral_policy=aug.neutral_policy,
    )
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    backend = _resolve_backend(backend_spec or base.backend_url, base)
    augmented = augment_with_explainer(examples, backend, cfg, base.template)
    data_io.write_examples(augmented, out_path)
    write_run_metadata(out_path, "augment", {**base.to_dict(), "augmentation": cfg.to_dict()})
    click.echo(f"{len(examples)} examples -> {len(augmented)} after augmentation", err=True)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", required=True, type=click.Choice(["esnli", "anli", "true"]))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--neutral", type=click.Choice([p.value for p in NeutralPolicy]), default="reject", show_default=True)
@click.option("--dataset-name", default=None, help="Grounding dataset name when the CSV lacks a column.")
def adapt(in_path, fmt, out_path, neutral, dataset_name) -> None:
    """Convert an external corpus into the native pairs JSONL schema."""
    examples, manifest = data_io.read_examples(
        in_path,
        data_io.DatasetFormat.from_string(fmt),
        neutral_policy=NeutralPolicy(neutral),
        dataset_name=dataset_name,
    )
    data_io.write_examples(examples, out_path)
    write_run_metadata(out_path, "adapt", {"format": fmt, "neutral": neutral, "manifest": manifest.to_dict()})
    click.echo(json.dumps(manifest.to_dict()), err=True)


@cli.command("emit-train")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-jsonl", required=True, type=click.Path(dir_okay=False))
@click.option("--out-tsv", default=None, type=click.Path(dir_okay=False))
@click.option(
    "--components",
    default="reasoning_classifier,hinted_classifier,explainer",
    show_default=True,
    help="Comma-separated component list.",
)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def emit_train(in_path, out_jsonl, out_tsv, components, config_path) -> None:
    """Emit seq2seq teacher-forcing records for the selected components."""
    base = _load_cli_config(config_path)
    try:
        kinds = [ComponentKind(c.strip()) for c in components.split(",") if c.strip()]
    except ValueError as exc:
        raise click.UsageError(f"unknown component: {exc}")
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    records = emit_training_records(examples, kinds, base.template)
    write_training_records(records, out_jsonl)
    if out_tsv:
        write_training_records_tsv(records, out_tsv)
    write_run_metadata(out_jsonl, "emit-train", {**base.to_dict(), "components": [k.value for k in kinds]})
    click.echo(f"emitted {len(records)} training records", err=True)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def features(in_path, out_path) -> None:
    """Export the handcrafted feature CSV for external trainers."""
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    write_feature_csv(examples, out_path)
    write_run_metadata(out_path, "features", {"input": str(in_path)})
    click.echo(f"wrote features for {len(examples)} examples", err=True)


@cli.group()
def baseline() -> None:
    """Train or apply the native linear baseline."""


@baseline.command("train")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-out", required=True, type=click.Path(dir_okay=False))
@click.option("--epochs", type=int, default=500, show_default=True)
@click.option("--learning-rate", type=float, default=0.5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def baseline_train(in_path, model_out, epochs, learning_rate, seed) -> None:
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    model = train_linear(examples, epochs=epochs, learning_rate=learning_rate, seed=seed)
    model.save(model_out)
    write_run_metadata(
        model_out,
        "baseline train",
        {"epochs": epochs, "learning_rate": learning_rate, "seed": seed},
    )
    click.echo(f"trained on {len(examples)} examples", err=True)


@baseline.command("predict")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--threshold", type=float, default=0.5, show_default=True)
def baseline_predict(in_path, model_path, out_path, threshold) -> None:
    examples, _ = data_io.read_examples(in_path, data_io.DatasetFormat.HHD_JSONL)
    model = LinearModel.load(model_path)
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        for ex in examples:
            prob = model.score_example(ex)
            label = Label.CONTRADICT if prob >= threshold else Label.ENTAIL
            f.write(
                json.dumps(
                    {"id": ex.id, "hallucination_prob": prob, "label": label.value},
                    ensure_ascii=False,
                )
                + "\n"
            )
    click.echo(f"scored {len(examples)} examples", err=True)


@cli.command("mock-serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--fixture", "fixture_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--fallback", type=click.Choice([f.value for f in MockFallback]), default="heuristic_overlap", show_default=True)
@click.option("--temperature", type=float, default=0.25, show_default=True)
@click.option("--max-input-chars", type=int, default=200_000, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def mock_serve(host, port, fixture_path, fallback, temperature, max_input_chars, config_path) -> None:
    """Serve the deterministic mock backend over the wire protocol.

    Doubles as the protocol conformance fixture for external shims.
    """
    base = _load_cli_config(config_path)
    scripted = load_scripted_fixture(fixture_path) if fixture_path else {}
    spec = MockBackendSpec(
        scripted_responses=scripted,
        fallback=MockFallback(fallback),
        heuristic_temperature=temperature,
    )
    server = make_server(
        MockBackend(spec, template=base.template),
        host=host,
        port=port,
        max_input_chars=max_input_chars,
        quiet=False,
    )
    click.echo(f"serving mock backend on http://{host}:{server.server_address[1]}", err=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


@cli.command("t-test")
@click.option("--runs-a", required=True, help="Comma-separated metric values.")
@click.option("--runs-b", required=True, help="Comma-separated metric values.")
def t_test_cmd(runs_a, runs_b) -> None:
    """Two-tailed paired t-test over repeated-run metrics."""
    a = [float(v) for v in runs_a.split(",") if v.strip()]
    b = [float(v) for v in runs_b.split(",") if v.strip()]
    result = paired_t_test(a, b)
    click.echo(
        json.dumps(
            {
                "t_statistic": result.t_statistic,
                "degrees_of_freedom": result.degrees_of_freedom,
                "significant_at_95": result.significant_at_95,
            }
        )
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Exit as exc:
        return EXIT_OK if exc.exit_code == 0 else EXIT_USAGE
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except BackendError as exc:
        click.echo(f"backend error: {exc}", err=True)
        return EXIT_BACKEND
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
