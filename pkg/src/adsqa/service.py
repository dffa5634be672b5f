"""End-to-end pipeline behind the CLI and the HTTP service.

``ask`` runs: classify (unless the domain is forced) -> correct -> tag ->
negation -> strip -> extract -> Boolean interpret -> plan -> execute ->
relax and rank when exact answers are scarce -> envelope.  ``explain`` stops
before execution.  All shared state is immutable after load, so requests can
be served concurrently.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from . import boolean
from .analyzer import Condition, extract_conditions
from .classifier import QuestionClassifier
from .corpus import Domain, load_domain, load_query_log
from .engine import (
    EngineConfig,
    MatchResult,
    SubstringIndex,
    branches,
    build_substring_index,
    execute,
    plan,
    relax_n_minus_1,
    to_sql,
)
from .errors import AdsQAError, ContradictionError, NoConditionsError
from .lexicon import Trie, build_trie, correct, load_identifier_table, strip_nonessential, tag
from .ranking import RankedAnswer, SimilarityStore, build_stores, rank_partials

NO_RESULTS_MESSAGE = "search retrieved no results"


@dataclass
class LoadedDomain:
    domain: Domain
    trie: Trie
    stores: SimilarityStore
    index: SubstringIndex


@dataclass
class AppState:
    domains: dict[str, LoadedDomain]
    classifier: QuestionClassifier | None = None
    config: EngineConfig = field(default_factory=EngineConfig)

    def get(self, name: str) -> LoadedDomain:
        try:
            return self.domains[name]
        except KeyError:
            raise AdsQAError(f"domain {name!r} is not loaded")


@dataclass
class AnswerEnvelope:
    question: str
    corrected: str
    domain: str
    posterior: float
    interpretation: str
    sql: str
    tags: list[dict]
    answers: list[dict]
    corrections: list[dict] = field(default_factory=list)
    unrecognized: list[str] = field(default_factory=list)
    message: str = ""
    relaxation_triggered: bool = False
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "corrected": self.corrected,
            "domain": self.domain,
            "posterior": self.posterior,
            "interpretation": self.interpretation,
            "sql": self.sql,
            "tags": self.tags,
            "answers": self.answers,
            "corrections": self.corrections,
            "unrecognized": self.unrecognized,
            "message": self.message,
            "relaxation_triggered": self.relaxation_triggered,
            "elapsed_ms": self.elapsed_ms,
        }


def bundled_data_dir() -> Path:
    import adsqa

    return Path(adsqa.__file__).parent / "data"


def load_state(data_dir: str | Path | None = None,
               config: EngineConfig | None = None,
               with_classifier: bool = True) -> AppState:
    """Load every domain under ``<data>/domains``, building the tagging trie,
    similarity stores, and substring index for each."""
    base = Path(data_dir) if data_dir is not None else bundled_data_dir()
    table = load_identifier_table(
        base / "identifiers.json" if (base / "identifiers.json").exists() else None)
    documents = _load_documents(base / "wordsim_corpus.txt")
    log_path = base / "query_log.jsonl"
    sessions = load_query_log(log_path)[0] if log_path.exists() else []

    domains: dict[str, LoadedDomain] = {}
    domains_dir = base / "domains"
    if domains_dir.is_dir():
        for sub in sorted(domains_dir.iterdir()):
            schema_file = sub / "schema.json"
            if not schema_file.exists():
                continue
            domain = load_domain(schema_file, sub / "lexicon.json", sub / "ads.jsonl")
            stores_file = base / "stores" / f"{domain.name}.json"
            if stores_file.exists():
                stores = SimilarityStore.load(stores_file)
            else:
                stores = build_stores(domain, sessions, documents, source_note=str(sub))
            domains[domain.name] = LoadedDomain(
                domain=domain,
                trie=build_trie(domain.lexicon, table, domain.schema),
                stores=stores,
                index=build_substring_index(domain),
            )

    classifier = None
    if with_classifier:
        model_file = base / "model.json"
        questions_file = base / "questions.jsonl"
        if model_file.exists():
            classifier = QuestionClassifier.load(model_file)
        elif questions_file.exists():
            classifier = QuestionClassifier.train(load_labeled_questions(questions_file))
    return AppState(domains=domains, classifier=classifier,
                    config=config or EngineConfig())


def _load_documents(path: Path) -> list[str]:
    if not path.exists():
        return []
    return [line.strip() for line in path.read_text("utf-8").splitlines() if line.strip()]


def load_labeled_questions(path: str | Path) -> list[tuple[str, str]]:
    import json

    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            out.append((doc["text"], doc["domain"]))
    return out


def _token_dicts(tokens) -> list[dict]:
    return [{
        "surface": t.surface,
        "display": t.shown,
        "label": t.label,
        "span": list(t.char_span),
        "negated": t.negated,
    } for t in tokens]


def _answer_dict(answer: RankedAnswer) -> dict:
    return {
        "record_id": answer.record_id,
        "kind": answer.kind,
        "score": round(answer.score, 4),
        "similarity_measure": answer.similarity_measure,
        "satisfied": answer.satisfied,
        "dropped_condition": (answer.dropped_condition.describe()
                              if answer.dropped_condition else None),
        "values": dict(answer.record.values),
    }


def _pipeline(state: AppState, question: str, domain_name: str | None):
    if not question.strip():
        raise NoConditionsError("no conditions extracted: empty question")
    posterior = 1.0
    if domain_name is None:
        if state.classifier is None:
            raise AdsQAError("no classifier trained and no domain forced")
        domain_name, posterior = state.classifier.classify(question)
    loaded = state.get(domain_name)
    correction = correct(question, loaded.trie)
    tokens = tag(correction.text, loaded.trie)
    tokens = boolean.detect_negation(tokens)
    stripped = strip_nonessential(tokens)
    conditions = extract_conditions(stripped, loaded.domain)
    if not conditions:
        raise NoConditionsError("no conditions extracted")
    return loaded, domain_name, posterior, correction, tokens, stripped, conditions


def ask(state: AppState, question: str, domain: str | None = None) -> AnswerEnvelope:
    """Answer a question: exact matches when they exist, otherwise ranked
    partially-matched answers; at most the configured answer cap of both."""
    started = time.perf_counter()
    loaded, domain_name, posterior, correction, tokens, stripped, conditions = _pipeline(
        state, question, domain)
    envelope = AnswerEnvelope(
        question=question,
        corrected=correction.text,
        domain=domain_name,
        posterior=round(posterior, 6),
        interpretation="",
        sql="",
        tags=_token_dicts(stripped),
        answers=[],
        corrections=[{"original": e.original, "replacement": e.replacement, "kind": e.kind}
                     for e in correction.edits],
        unrecognized=list(correction.unrecognized),
    )
    try:
        expr = boolean.interpret(correction.text, conditions, loaded.domain.schema)
    except ContradictionError:
        envelope.message = NO_RESULTS_MESSAGE
        envelope.elapsed_ms = (time.perf_counter() - started) * 1000
        return envelope
    query_plan = plan(expr, state.config.answer_cap)
    envelope.interpretation = expr.pretty()
    envelope.sql = to_sql(query_plan, loaded.domain)
    exacts = execute(query_plan, loaded.domain, loaded.index)

    answers: list[RankedAnswer] = [
        RankedAnswer(record_id=m.record.record_id, record=m.record, kind="exact",
                     score=float(m.satisfied), similarity_measure="exact match",
                     satisfied=m.satisfied)
        for m in exacts
    ]
    partials: list[MatchResult] = []
    if (len(exacts) < state.config.relax_threshold
            and query_plan.overlay is not None):
        envelope.relaxation_triggered = True
        exclude = {m.record.record_id for m in exacts}
        for branch in branches(query_plan.overlay):
            found = relax_n_minus_1(branch, loaded.domain, exclude_ids=exclude)
            for m in found:
                exclude.add(m.record.record_id)
            partials.extend(found)
        if partials:
            envelope.sql = to_sql(query_plan, loaded.domain, relaxed=True)
        answers.extend(rank_partials(partials, loaded.stores))
    envelope.answers = [_answer_dict(a) for a in answers[:state.config.answer_cap]]
    if not envelope.answers:
        envelope.message = NO_RESULTS_MESSAGE
    envelope.elapsed_ms = (time.perf_counter() - started) * 1000
    return envelope


def explain(state: AppState, question: str, domain: str | None = None) -> AnswerEnvelope:
    """Same pipeline halted before execution: tags, interpretation, and the
    structured-query text, with no answers."""
    started = time.perf_counter()
    loaded, domain_name, posterior, correction, tokens, stripped, conditions = _pipeline(
        state, question, domain)
    envelope = AnswerEnvelope(
        question=question,
        corrected=correction.text,
        domain=domain_name,
        posterior=round(posterior, 6),
        interpretation="",
        sql="",
        tags=_token_dicts(stripped),
        answers=[],
        corrections=[{"original": e.original, "replacement": e.replacement, "kind": e.kind}
                     for e in correction.edits],
        unrecognized=list(correction.unrecognized),
    )
    try:
        expr = boolean.interpret(correction.text, conditions, loaded.domain.schema)
    except ContradictionError:
        envelope.message = NO_RESULTS_MESSAGE
        envelope.elapsed_ms = (time.perf_counter() - started) * 1000
        return envelope
    envelope.interpretation = expr.pretty()
    envelope.sql = to_sql(plan(expr, state.config.answer_cap), loaded.domain)
    envelope.elapsed_ms = (time.perf_counter() - started) * 1000
    return envelope


class AskRequest(BaseModel):
    question: str
    domain: str | None = None


def create_app(state: AppState, static_dir: str | Path | None = None):
    """FastAPI application exposing the pipeline; optionally serves the
    browser console as static files."""
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="adsqa", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/domains")
    def domains():
        return {"domains": sorted(state.domains)}

    @app.post("/ask")
    def ask_endpoint(request: AskRequest):
        try:
            return ask(state, request.question, request.domain).to_dict()
        except AdsQAError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/explain")
    def explain_endpoint(request: AskRequest):
        try:
            return explain(state, request.question, request.domain).to_dict()
        except AdsQAError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app
