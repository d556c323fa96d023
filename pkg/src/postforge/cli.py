"""Command-line entry points. Each subcommand is a thin wrapper over the
library; `serve` starts the HTTP service the web UI talks to."""

from __future__ import annotations

import json
import logging
import random
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .classifier import (
    TrainingConfig,
    evaluate,
    load_model,
    predict_any,
    save_model,
    select_features,
    split_dataset,
    train_tree,
    tune_cp,
)
from .classifier.dataset import iqr_filter
from .classifier.mlp import train_mlp
from .classifier.svm import train_svm
from .features import (
    LabeledExample,
    VoteSheet,
    extract_features,
    extract_features_with_flags,
    load_dataset,
    resolve_vote_sheets,
    summarize,
    write_dataset,
)
from .ingest import fetch_questions
from .records import parse_timestamp
from .service.config import PipelineConfig
from .service.pipeline import NoCandidate, Pipeline
from .snippets.clones import detect_clones
from .snippets.draft import DraftAnswer, compose_draft
from .snippets.lexer import lex
from .store import QuestionStore


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@main.command()
@click.option("--source", type=click.Choice(["api", "dump"]), required=True)
@click.option("--tag", default="java", show_default=True)
@click.option("--from", "from_date", default="2013-01-01", show_default=True)
@click.option("--to", "to_date", default="2019-12-31", show_default=True)
@click.option("--out", "store_dir", required=True, type=click.Path())
@click.option("--dump-file", type=click.Path(exists=True), help="Required for --source dump.")
@click.option("--page-limit", default=10, show_default=True)
def ingest(source, tag, from_date, to_date, store_dir, dump_file, page_limit):
    """Fetch questions into a local store (API key via POSTFORGE_API_KEY)."""
    if source == "dump" and not dump_file:
        raise click.UsageError("--source dump requires --dump-file")
    store = QuestionStore(store_dir)
    date_range = (parse_timestamp(from_date), parse_timestamp(to_date))
    records, report = fetch_questions(
        tag, date_range, source, page_limit, store=store, dump_path=dump_file
    )
    click.echo(json.dumps(report.to_dict(), indent=2))
    click.echo(f"store now holds {len(store)} questions")


def _read_vote_sheets(path: str) -> list[VoteSheet]:
    sheets = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            sheets.append(
                VoteSheet(
                    question_id=int(data["question_id"]),
                    votes=tuple(data["votes"]),
                    criteria=tuple(data.get("criteria", ())),
                    override=data.get("override"),
                )
            )
    return sheets


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--report", "report_file", type=click.Path(), help="Also write a distribution TSV.")
def features(store_dir, labels_file, out_file, report_file):
    """Compute feature vectors for labeled questions into a dataset file."""
    store = QuestionStore(store_dir, create=False)
    labels, needs_review, dropped = resolve_vote_sheets(_read_vote_sheets(labels_file))
    examples = []
    degenerate = 0
    for qid, label in sorted(labels.items()):
        try:
            record = store.get(qid)
        except KeyError:
            click.echo(f"warning: labeled question {qid} not in store", err=True)
            continue
        fv, flags = extract_features_with_flags(record)
        if flags:
            degenerate += 1
        examples.append(LabeledExample(question_id=qid, features=fv, label=label))
    header = {
        "aar_basis": "collection-time reputation",
        "zero_answer_convention": "sas=acc=aar=0, haa=false",
        "degenerate_inputs": degenerate,
    }
    write_dataset(out_file, examples, header=header)
    click.echo(
        f"wrote {len(examples)} examples ({degenerate} degenerate), "
        f"{len(needs_review)} need review, {len(dropped)} dropped (<3 votes)"
    )
    if report_file:
        report = summarize(examples)
        Path(report_file).write_text(report.to_tsv(), encoding="utf-8")
        click.echo(f"distribution report: {report_file}")


@main.command()
@click.option("--dataset", "dataset_file", required=True, type=click.Path(exists=True))
@click.option("--ratio", default=0.8, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--train", "train_out", required=True, type=click.Path())
@click.option("--test", "test_out", required=True, type=click.Path())
def split(dataset_file, ratio, seed, train_out, test_out):
    """Stratified train/test split of a dataset file."""
    examples, header = load_dataset(dataset_file)
    train_part, test_part = split_dataset(examples, ratio, seed)
    write_dataset(train_out, train_part, header=header or None)
    write_dataset(test_out, test_part, header=header or None)
    click.echo(f"train: {len(train_part)}  test: {len(test_part)}")


@main.command()
@click.option("--dataset", "dataset_file", required=True, type=click.Path(exists=True))
@click.option("--model", "model_kind", type=click.Choice(["dt", "mlp", "svm"]), default="dt")
@click.option("--cp", default=0.012, show_default=True)
@click.option("--tune/--no-tune", default=False, help="Tune cp on a grid instead of using --cp.")
@click.option("--loocv", is_flag=True, help="Leave-one-out CV when tuning.")
@click.option("--hidden-units", default=66, show_default=True)
@click.option("--gamma", default=2.0**-5, show_default=True)
@click.option("--cost", default=float(2**18), show_default=True)
@click.option("--degree", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--features", "subset", default="", help="Comma-separated feature subset.")
@click.option("--iqr-train", is_flag=True, help="Drop IQR outliers before training.")
@click.option("--out", "model_file", required=True, type=click.Path())
def train(dataset_file, model_kind, cp, tune, loocv, hidden_units, gamma, cost, degree, seed, subset, iqr_train, model_file):
    """Train a classifier and write the model file."""
    examples, _ = load_dataset(dataset_file)
    if iqr_train:
        before = len(examples)
        examples = iqr_filter(examples)
        click.echo(f"IQR filter kept {len(examples)}/{before} examples")
    cfg = TrainingConfig(rng_seed=seed, tuning_mode="loocv" if loocv else "kfold")
    feature_subset = tuple(s.strip() for s in subset.split(",") if s.strip()) or None
    if model_kind == "dt":
        if tune:
            cp = tune_cp(examples, cfg)
            click.echo(f"tuned cp: {cp}")
        model = train_tree(examples, cp, feature_subset, min_leaf=cfg.min_leaf, max_depth=cfg.max_depth)
    elif model_kind == "mlp":
        model = train_mlp(examples, hidden_units, cfg, feature_subset)
    else:
        model = train_svm(examples, gamma, cost, degree, cfg, feature_subset)
    save_model(model, model_file)
    click.echo(f"wrote {model_kind} model to {model_file}")


@main.command("eval")
@click.option("--model", "model_file", required=True, type=click.Path(exists=True))
@click.option("--dataset", "dataset_file", required=True, type=click.Path(exists=True))
def eval_cmd(model_file, dataset_file):
    """Evaluate a model on a labeled dataset."""
    model = load_model(model_file)
    examples, _ = load_dataset(dataset_file)
    pairs = [(predict_any(model, ex.features)[0], ex.label) for ex in examples]
    metrics = evaluate(pairs)
    click.echo(json.dumps(metrics.to_dict(), indent=2))


@main.command()
@click.option("--dataset", "dataset_file", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["rfe", "ga", "sa"]), required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_file", type=click.Path())
def select(dataset_file, method, seed, out_file):
    """Wrapper feature selection with 10-fold CV scoring."""
    examples, _ = load_dataset(dataset_file)
    cfg = TrainingConfig(rng_seed=seed)
    subset = select_features(examples, method, cfg)
    click.echo(json.dumps(subset.to_dict(), indent=2))
    if out_file:
        Path(out_file).write_text(json.dumps(subset.to_dict(), indent=2), encoding="utf-8")


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--context", "context_dir", required=True, type=click.Path(exists=True))
@click.option("--profile", "profile_file", required=True, type=click.Path(exists=True))
@click.option("--model", "model_file", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--now", "now_str", default=None, help="Override the clock (ISO timestamp).")
def suggest(store_dir, context_dir, profile_file, model_file, seed, now_str):
    """One-shot pipeline run: pick a deficient post for this developer."""
    cfg = PipelineConfig(
        store=Path(store_dir),
        model=Path(model_file),
        profile=Path(profile_file),
        context_dir=Path(context_dir),
        rng_seed=seed,
    )
    pipeline = Pipeline.from_config(cfg)
    now = parse_timestamp(now_str) if now_str else datetime.now(tz=timezone.utc)
    outcome = pipeline.run(now, rng=random.Random(seed))
    if isinstance(outcome, NoCandidate):
        click.echo(
            json.dumps(
                {
                    "no_candidate": outcome.reason,
                    "retry_at": outcome.retry_at.isoformat(),
                    "stage_counts": outcome.stage_counts,
                },
                indent=2,
            )
        )
        sys.exit(1)
    payload = {
        "session_id": outcome.session_id,
        "question_id": outcome.question_id,
        "similarity": outcome.similarity,
        "component_scores": outcome.component_scores,
        "state": outcome.state,
    }
    if outcome.draft is not None:
        payload["draft_snippet"] = outcome.draft.snippet
    click.echo(json.dumps(payload, indent=2))


@main.command()
@click.option("--question", "question_id", required=True, type=int)
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--min-lines", default=6, show_default=True)
@click.option("--normalize", is_flag=True)
@click.option("--outbox", "outbox_dir", default="outbox", show_default=True, type=click.Path())
def draft(question_id, store_dir, corpus_dir, min_lines, normalize, outbox_dir):
    """Compose a draft answer for one question from a source corpus."""
    store = QuestionStore(store_dir, create=False)
    question = store.get(question_id)
    corpus_texts: dict[str, str] = {}
    corpus_streams = []
    for path in sorted(Path(corpus_dir).rglob("*.java")):
        text = path.read_text(encoding="utf-8")
        corpus_texts[str(path)] = text
        corpus_streams.append(lex(text, source_id=str(path)))
    matches = []
    for i, block in enumerate(question.code_blocks):
        needle = lex(block, source_id=f"q{question_id}#{i}")
        matches.extend(detect_clones(needle, corpus_streams, min_lines, normalize))
    outcome = compose_draft(question, matches, corpus_texts)
    if isinstance(outcome, DraftAnswer):
        out = Path(outbox_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"draft-q{question_id}.json"
        path.write_text(json.dumps(outcome.to_dict(), indent=2), encoding="utf-8")
        click.echo(f"draft written to {path}")
        click.echo(outcome.snippet)
    else:
        click.echo(f"no recommendation: {outcome.reason}")
        sys.exit(1)


@main.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--port", default=8571, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--live", is_flag=True, help="Allow live submissions (config must also disable dry_run).")
def serve(config_file, port, host, live):
    """Run the HTTP service for the review UI."""
    import uvicorn

    from .service.api import build_service

    cfg = PipelineConfig.from_file(config_file)
    if not cfg.dry_run and not live:
        raise click.UsageError("config disables dry_run; pass --live to confirm live posting")
    app = build_service(config_file)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
