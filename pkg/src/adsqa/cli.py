"""Command-line interface: ingest, build-stores, train, ask, explain, eval, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import boolean
from .analyzer import extract_conditions
from .classifier import QuestionClassifier
from .corpus import load_domain, load_query_log
from .engine import EngineConfig, build_substring_index
from .errors import AdsQAError
from .evalharness import comparison_csv, load_judgments, run_comparison
from .lexicon import correct, strip_nonessential, tag
from .ranking import build_stores
from .service import (
    ask as service_ask,
    bundled_data_dir,
    create_app,
    explain as service_explain,
    load_labeled_questions,
    load_state,
)


@click.group()
def main():
    """Question answering over classified-ads records."""


@main.command()
@click.option("--schema", "schema_file", required=True, type=click.Path(exists=True))
@click.option("--lexicon", "lexicon_file", required=True, type=click.Path(exists=True))
@click.option("--ads", "ads_file", required=True, type=click.Path(exists=True))
@click.option("--log", "log_file", type=click.Path(exists=True))
def ingest(schema_file, lexicon_file, ads_file, log_file):
    """Validate a domain's data files and report what was loaded."""
    try:
        domain = load_domain(schema_file, lexicon_file, ads_file)
    except AdsQAError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"domain {domain.name}: {len(domain.records)} records")
    for attr, (low, high) in sorted(domain.ranges.items()):
        click.echo(f"  {attr}: [{low:g}, {high:g}]")
    if log_file:
        sessions, rejected = load_query_log(log_file)
        click.echo(f"query log: {len(sessions)} sessions, {len(rejected)} rejected lines")
        for line_no, reason in rejected:
            click.echo(f"  line {line_no}: {reason}", err=True)


@main.command("build-stores")
@click.option("--data", "data_dir", type=click.Path(exists=True), default=None,
              help="Data directory (defaults to the bundled one).")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def build_stores_cmd(data_dir, out_dir):
    """Build similarity matrices, numeric ranges, and the substring index."""
    base = Path(data_dir) if data_dir else bundled_data_dir()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sessions = []
    log_path = base / "query_log.jsonl"
    if log_path.exists():
        sessions, _ = load_query_log(log_path)
    docs_path = base / "wordsim_corpus.txt"
    documents = ([line for line in docs_path.read_text("utf-8").splitlines() if line.strip()]
                 if docs_path.exists() else [])
    for sub in sorted((base / "domains").iterdir()):
        if not (sub / "schema.json").exists():
            continue
        domain = load_domain(sub / "schema.json", sub / "lexicon.json", sub / "ads.jsonl")
        stores = build_stores(domain, sessions, documents, source_note=str(sub))
        stores.save(out / f"{domain.name}.json")
        build_substring_index(domain).save(out / f"{domain.name}.index.json")
        click.echo(f"built stores for {domain.name} -> {out}")


@main.command()
@click.option("--questions", "questions_file", required=True, type=click.Path(exists=True),
              help="JSON Lines of {text, domain}.")
@click.option("--out", "out_file", required=True, type=click.Path())
def train(questions_file, out_file):
    """Train the domain classifier and write the model as JSON."""
    labeled = load_labeled_questions(questions_file)
    clf = QuestionClassifier.train(labeled)
    clf.save(out_file)
    click.echo(f"trained on {len(labeled)} questions over {len(clf.domains)} domains -> {out_file}")


def _echo_envelope(envelope, as_json: bool):
    if as_json:
        click.echo(json.dumps(envelope.to_dict(), indent=2))
        return
    click.echo(f"question:       {envelope.question}")
    if envelope.corrected != envelope.question:
        click.echo(f"corrected:      {envelope.corrected}")
    click.echo(f"domain:         {envelope.domain} (posterior {envelope.posterior})")
    click.echo(f"tags:           " + "  ".join(f"{t['display']}/{t['label']}" for t in envelope.tags))
    if envelope.interpretation:
        click.echo(f"interpretation: {envelope.interpretation}")
    if envelope.sql:
        click.echo(f"sql:            {envelope.sql}")
    if envelope.message:
        click.echo(envelope.message)
    for i, a in enumerate(envelope.answers, 1):
        values = ", ".join(f"{k}={v}" for k, v in a["values"].items())
        extra = "" if a["kind"] == "exact" else f"  [{a['similarity_measure']}]"
        click.echo(f"{i:2}. [{a['kind']}] score={a['score']:g} {values}{extra}")


@main.command("ask")
@click.argument("question")
@click.option("--domain", default=None)
@click.option("--data", "data_dir", type=click.Path(exists=True), default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
def ask_cmd(question, domain, data_dir, as_json):
    """Answer a question; exact matches first, then ranked partial matches."""
    state = load_state(data_dir)
    try:
        envelope = service_ask(state, question, domain)
    except AdsQAError as exc:
        raise click.ClickException(str(exc))
    _echo_envelope(envelope, as_json)


@main.command("explain")
@click.argument("question")
@click.option("--domain", default=None)
@click.option("--data", "data_dir", type=click.Path(exists=True), default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
def explain_cmd(question, domain, data_dir, as_json):
    """Show the pipeline's interpretation of a question without executing it."""
    state = load_state(data_dir)
    try:
        envelope = service_explain(state, question, domain)
    except AdsQAError as exc:
        raise click.ClickException(str(exc))
    _echo_envelope(envelope, as_json)


@main.command("eval")
@click.option("--judgments", "judgments_file", required=True, type=click.Path(exists=True))
@click.option("--domain", default="cars")
@click.option("--data", "data_dir", type=click.Path(exists=True), default=None)
@click.option("--methods", default="all")
@click.option("--seed", default=7, type=int)
def eval_cmd(judgments_file, domain, data_dir, methods, seed):
    """Compare ranking methods on a judgment fixture; emits CSV."""
    state = load_state(data_dir, with_classifier=False)
    loaded = state.get(domain)
    judgments = load_judgments(judgments_file)
    conditions = {}
    for judgment in judgments:
        fixed = correct(judgment.question, loaded.trie).text
        tokens = boolean.detect_negation(tag(fixed, loaded.trie))
        conditions[judgment.question] = extract_conditions(
            strip_nonessential(tokens), loaded.domain)
    rows = run_comparison(loaded.domain, loaded.stores, judgments, conditions, seed=seed)
    if methods != "all":
        wanted = set(methods.split(","))
        rows = [r for r in rows if r["method"] in wanted]
    click.echo(comparison_csv(rows), nl=False)


@main.command()
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--data", "data_dir", type=click.Path(exists=True), default=None)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory with the built browser console.")
@click.option("--answer-cap", default=30, type=int)
def serve(port, host, data_dir, static_dir, answer_cap):
    """Run the HTTP service (POST /ask, POST /explain, GET /domains)."""
    import uvicorn

    state = load_state(data_dir, config=EngineConfig(answer_cap=answer_cap))
    app = create_app(state, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
