"""Retrieval metrics and the four reference rankers used for comparison.

Judgment fixtures are JSON Lines, one question per line::

    {"question": "...", "candidates": [{"record_id": "car-001", "related": 1}, ...]}

The harness feeds every ranker the same candidate set so only the ordering
strategy varies, then reports P@1, P@5, and MRR per method as CSV.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analyzer import Condition
from .corpus import AdRecord, AttrType, Domain
from .engine import satisfies
from .errors import IngestError
from .lexicon.shorthand import values_match
from .ranking import SimilarityStore, rank_sim
from .textnorm import words


@dataclass(frozen=True)
class Judgment:
    question: str
    candidates: tuple[tuple[str, int], ...]  # (record_id, related 0|1)

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidate list must be non-empty")
        for _, label in self.candidates:
            if label not in (0, 1):
                raise ValueError(f"relevance labels must be 0 or 1, got {label}")


def load_judgments(path: str | Path) -> list[Judgment]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                out.append(Judgment(
                    question=doc["question"],
                    candidates=tuple((c["record_id"], int(c["related"]))
                                     for c in doc["candidates"])))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise IngestError(f"{path}:{line_no}: bad judgment line: {exc}")
    return out


def accuracy(predictions: Sequence, labels: Sequence) -> float:
    if len(predictions) != len(labels):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(labels)} labels")
    if not predictions:
        raise ValueError("empty inputs")
    correct = sum(1 for p, y in zip(predictions, labels) if p == y)
    return correct / len(predictions)


def precision_recall_f(retrieved: Iterable, relevant_set: Iterable) -> tuple[float, float, float]:
    retrieved = list(retrieved)
    relevant = set(relevant_set)
    correct = sum(1 for r in retrieved if r in relevant)
    p = correct / len(retrieved) if retrieved else 0.0
    r = correct / len(relevant) if relevant else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def p_at_k(judgments: Sequence[Sequence[int]], k: int) -> float:
    """Mean fraction of related answers among each question's top k labels."""
    if not judgments:
        raise ValueError("no judgments")
    total = 0.0
    for labels in judgments:
        if len(labels) < k:
            raise ValueError(f"candidate list of length {len(labels)} is shorter than K={k}")
        total += sum(labels[:k]) / k
    return total / len(judgments)


def mrr(judgments: Sequence[Sequence[int]], window: int = 5) -> float:
    """Mean reciprocal rank of the first related answer in the top window;
    a question with no related answer there contributes zero."""
    if not judgments:
        raise ValueError("no judgments")
    total = 0.0
    for labels in judgments:
        for pos, label in enumerate(labels[:window], start=1):
            if label:
                total += 1.0 / pos
                break
    return total / len(judgments)


def baseline_random(candidates: Sequence, seed: int) -> list:
    out = list(candidates)
    random.Random(seed).shuffle(out)
    return out


def baseline_cosine(conditions: list[Condition], record: AdRecord) -> float:
    """Binary-weight cosine between the all-ones question vector and the
    record's satisfaction vector: sqrt(satisfied / N)."""
    n = len(conditions)
    if n == 0:
        return 0.0
    satisfied = sum(1 for c in conditions if satisfies(record, c))
    return math.sqrt(satisfied / n)


def jaccard(a: Iterable, b: Iterable) -> float:
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 0.0
    return len(sa & sb) / len(sa | sb)


def build_supertuples(domain: Domain) -> dict[tuple[str, str], dict[str, set[str]]]:
    """Per (attribute, value): the bag of values each other categorical
    attribute takes within the group of records sharing that value."""
    categorical = [a.name for a in domain.schema.attributes if a.value_kind == "categorical"]
    out: dict[tuple[str, str], dict[str, set[str]]] = {}
    for record in domain.records.values():
        for attr in categorical:
            value = record.value(attr)
            if value is None:
                continue
            key = (attr, str(value).lower())
            tup = out.setdefault(key, {})
            for other in categorical:
                if other == attr:
                    continue
                ov = record.value(other)
                if ov is not None:
                    tup.setdefault(other, set()).add(str(ov).lower())
    return out


def vsim(supertuple_a: dict[str, set[str]], supertuple_b: dict[str, set[str]]) -> float:
    """Mean Jaccard coefficient over the attributes both supertuples cover."""
    shared = set(supertuple_a) & set(supertuple_b)
    if not shared:
        return 0.0
    return sum(jaccard(supertuple_a[attr], supertuple_b[attr]) for attr in shared) / len(shared)


def baseline_aimq(conditions: list[Condition], record: AdRecord,
                  supertuples: dict[tuple[str, str], dict[str, set[str]]]) -> float:
    """Attribute-wise similarity with equal importance weights 1/n: supertuple
    Jaccard for categorical attributes, 1 - |Q - A| / Q for numeric ones (an
    exact-match indicator when the question value is zero)."""
    n = len(conditions)
    if n == 0:
        return 0.0
    weight = 1.0 / n
    total = 0.0
    for cond in conditions:
        if cond.attr_type in (AttrType.TYPE1, AttrType.TYPE2):
            rv = record.value(cond.attribute)
            if rv is None:
                continue
            qv = str(cond.value).lower()
            rv = str(rv).lower()
            if values_match(qv, rv):
                total += weight
                continue
            key_q = (cond.attribute, qv)
            key_r = (cond.attribute, rv)
            tup_q = supertuples.get(key_q, {cond.attribute: {qv}})
            tup_r = supertuples.get(key_r, {cond.attribute: {rv}})
            total += weight * vsim(tup_q, tup_r)
        else:
            target = _question_number(cond)
            if target is None:
                continue
            best = None
            for attr in cond.attributes:
                rv = record.value(attr)
                if rv is None:
                    continue
                if target == 0:
                    term = 1.0 if float(rv) == 0 else 0.0
                else:
                    term = 1.0 - abs(target - float(rv)) / abs(target)
                best = term if best is None else max(best, term)
            if best is not None:
                total += weight * best
    return total


def _question_number(cond: Condition) -> float | None:
    if cond.comparator == "between":
        low, high = cond.value
        return (low + high) / 2.0
    if cond.value is None:
        return None
    return float(cond.value)


class TfIdfStats:
    """TF-IDF over the record corpus, each record's values joined as one document."""

    def __init__(self, domain: Domain):
        self.doc_terms: dict[str, Counter] = {}
        df: Counter = Counter()
        for rid, record in domain.records.items():
            terms = Counter(self._record_words(record))
            self.doc_terms[rid] = terms
            for term in terms:
                df[term] += 1
        self.df = df
        self.n_docs = max(len(self.doc_terms), 1)

    @staticmethod
    def _record_words(record: AdRecord) -> list[str]:
        out = []
        for value in record.values.values():
            out.extend(words(str(value)))
        return out

    def idf(self, term: str) -> float:
        d = self.df.get(term, 0)
        if d == 0:
            return 0.0
        return math.log(self.n_docs / d)

    def vector(self, terms: Counter) -> dict[str, float]:
        return {t: tf * self.idf(t) for t, tf in terms.items() if self.idf(t) > 0}

    def cosine(self, query_terms: Counter, record_id: str) -> float:
        qv = self.vector(query_terms)
        dv = self.vector(self.doc_terms[record_id])
        dot = sum(w * dv.get(t, 0.0) for t, w in qv.items())
        qn = math.sqrt(sum(w * w for w in qv.values()))
        dn = math.sqrt(sum(w * w for w in dv.values()))
        if qn == 0 or dn == 0:
            return 0.0
        return dot / (qn * dn)


def baseline_faqfinder(question: str, record_id: str, stats: TfIdfStats) -> float:
    return stats.cosine(Counter(words(question)), record_id)


def _order_labels(judgment: Judgment, order: list[str]) -> list[int]:
    labels = dict(judgment.candidates)
    return [labels[rid] for rid in order]


def run_comparison(domain: Domain, stores: SimilarityStore,
                   judgments: list[Judgment],
                   question_conditions: dict[str, list[Condition]],
                   seed: int = 7, window: int = 5) -> list[dict]:
    """Rank every judgment's candidates with each method and report
    P@1 / P@5 / MRR rows, all methods consuming identical candidate sets."""
    stats = TfIdfStats(domain)
    supertuples = build_supertuples(domain)
    per_method: dict[str, list[list[int]]] = {m: [] for m in
                                              ("ranked", "cosine", "aimq", "faqfinder", "random")}
    for judgment in judgments:
        conditions = question_conditions.get(judgment.question, [])
        ids = [rid for rid, _ in judgment.candidates]
        records = {rid: domain.records[rid] for rid in ids if rid in domain.records}
        scorers = {
            "ranked": lambda rid: _pipeline_score(conditions, records[rid], stores),
            "cosine": lambda rid: baseline_cosine(conditions, records[rid]),
            "aimq": lambda rid: baseline_aimq(conditions, records[rid], supertuples),
            "faqfinder": lambda rid: baseline_faqfinder(judgment.question, rid, stats),
        }
        for method, scorer in scorers.items():
            order = sorted(records, key=lambda rid: (-scorer(rid), rid))
            per_method[method].append(_order_labels(judgment, order))
        per_method["random"].append(_order_labels(judgment, baseline_random(list(records), seed)))
    rows = []
    for method, labels in per_method.items():
        rows.append({
            "method": method,
            "p_at_1": p_at_k(labels, 1),
            "p_at_5": p_at_k(labels, min(5, min(len(l) for l in labels))),
            "mrr": mrr(labels, window),
        })
    return rows


def _pipeline_score(conditions: list[Condition], record: AdRecord,
                    stores: SimilarityStore) -> float:
    """Score a fixture candidate the way the pipeline ranks answers: exact
    matches above everything, single-miss records by their rank score, and
    farther records by satisfied count."""
    if not conditions:
        return 0.0
    failing = [c for c in conditions if not satisfies(record, c)]
    n = len(conditions)
    if not failing:
        return float(n)
    if len(failing) == 1:
        return rank_sim(conditions, record, failing[0], stores)
    return float(n - len(failing))


def comparison_csv(rows: list[dict]) -> str:
    lines = ["method,p_at_1,p_at_5,mrr"]
    for row in rows:
        lines.append(f"{row['method']},{row['p_at_1']:.4f},{row['p_at_5']:.4f},{row['mrr']:.4f}")
    return "\n".join(lines) + "\n"
