"""Similarity stores and the partial-answer ranking score.

Three stores back the score:

* a query-log matrix between identifier values (five normalized features:
  rewrites, submission gaps, dwell on cross-clicked ads, click ranks, and
  cross-click counts);
* a word-correlation matrix built from co-occurrence frequency and positional
  distance in a document collection;
* per-attribute numeric ranges (mean of the ten highest values minus mean of
  the ten lowest).

A partial answer with one dropped condition scores (N - 1) plus one
type-appropriate similarity term in [0, 1], so the score always lands in
[N - 1, N] and exact answers outrank every partial one.
"""

from __future__ import annotations

import itertools
import json
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .analyzer import Condition
from .corpus import AttrType, Domain, QueryLogSession
from .engine import MatchResult
from .errors import RangeUnavailableError
from .textnorm import content_words, normalize_phrase

Pair = tuple[str, str]

FEATURE_NAMES = ("mod", "time", "ad_time", "rank", "click")


def _pair(a: str, b: str) -> Pair:
    return (a, b) if a <= b else (b, a)


@dataclass
class TIMatrix:
    """Symmetric similarity between identifier values, from query logs."""

    features: dict[Pair, dict[str, float]] = field(default_factory=dict)
    ti_sim: dict[Pair, float] = field(default_factory=dict)
    max_ti_sim: float = 0.0

    def sim(self, a: str, b: str) -> float:
        return self.ti_sim.get(_pair(normalize_phrase(a), normalize_phrase(b)), 0.0)

    def normalized_sim(self, a: str, b: str) -> float:
        if self.max_ti_sim <= 0:
            return 0.0
        return min(1.0, self.sim(a, b) / self.max_ti_sim)


def _phrase_values(query: str, vocabulary: frozenset[str]) -> set[str]:
    padded = f" {normalize_phrase(query)} "
    return {v for v in vocabulary if f" {v} " in padded}


def build_ti_matrix(sessions: Iterable[QueryLogSession], vocabulary: Iterable[str],
                    ad_values: Mapping[str, set[str]] | None = None) -> TIMatrix:
    """Count the five features over the log, then normalize each by its
    log-wide maximum.  ``ad_values`` resolves a clicked ad id to the identifier
    values it contains; without it the click-based features stay zero.
    An empty log yields the all-zero matrix.
    """
    vocab = frozenset(normalize_phrase(v) for v in vocabulary)
    ad_values = ad_values or {}
    mod_counts: dict[Pair, int] = defaultdict(int)
    gaps: dict[Pair, list[float]] = defaultdict(list)
    dwells: dict[Pair, list[float]] = defaultdict(list)
    ranks: dict[Pair, list[float]] = defaultdict(list)
    clicks: dict[Pair, int] = defaultdict(int)

    for session in sessions:
        entries = list(session.entries)
        values_per_entry = [_phrase_values(e.query_text, vocab) for e in entries]
        for (prev, prev_vals), (cur, cur_vals) in zip(
                zip(entries, values_per_entry), zip(entries[1:], values_per_entry[1:])):
            for a in prev_vals - cur_vals:
                for b in cur_vals - prev_vals:
                    if a != b:
                        mod_counts[_pair(a, b)] += 1
        for i, j in itertools.combinations(range(len(entries)), 2):
            gap = entries[j].timestamp - entries[i].timestamp
            for a in values_per_entry[i]:
                for b in values_per_entry[j]:
                    if a != b:
                        gaps[_pair(a, b)].append(gap)
        for entry, vals in zip(entries, values_per_entry):
            for click in entry.clicked_ads:
                ad_vals = {normalize_phrase(v) for v in ad_values.get(click.ad_id, set())}
                for a in vals:
                    for b in ad_vals & vocab:
                        if a == b:
                            continue
                        key = _pair(a, b)
                        dwells[key].append(click.dwell_seconds)
                        ranks[key].append(float(click.rank_position))
                        clicks[key] += 1

    pairs = set(mod_counts) | set(gaps) | set(dwells) | set(ranks) | set(clicks)
    raw: dict[Pair, dict[str, float]] = {}
    avg_gap = {p: sum(v) / len(v) for p, v in gaps.items()}
    max_gap = max(avg_gap.values(), default=0.0)
    inv_rank = {p: len(v) / sum(v) if sum(v) else 0.0 for p, v in ranks.items()}
    for p in pairs:
        raw[p] = {
            # already in [0, 1]: the division by the log-wide maximum gap is
            # built into the inversion
            "time": (1.0 - avg_gap[p] / max_gap) if p in avg_gap and max_gap > 0 else 0.0,
            "mod": float(mod_counts.get(p, 0)),
            "ad_time": (sum(dwells[p]) / len(dwells[p])) if p in dwells else 0.0,
            "rank": inv_rank.get(p, 0.0),
            "click": float(clicks.get(p, 0)),
        }
    matrix = TIMatrix()
    for name in FEATURE_NAMES:
        if name == "time":
            for p, f in raw.items():
                matrix.features.setdefault(p, {})[name] = f[name]
            continue
        top = max((f[name] for f in raw.values()), default=0.0)
        for p, f in raw.items():
            matrix.features.setdefault(p, {})[name] = f[name] / top if top > 0 else f[name]
    for p, f in matrix.features.items():
        matrix.ti_sim[p] = sum(f[name] for name in FEATURE_NAMES)
    matrix.max_ti_sim = max(matrix.ti_sim.values(), default=0.0)
    return matrix


@dataclass
class WSMatrix:
    """Symmetric word-correlation store over stemmed, stop-filtered words."""

    corr: dict[Pair, float] = field(default_factory=dict)
    max_corr: float = 0.0

    def word_sim(self, a: str, b: str) -> float:
        return self.corr.get(_pair(a, b), 0.0)

    def feat_sim(self, a: str, b: str) -> float:
        """Raw similarity between two (possibly multi-word) property values:
        the mean correlation over their word pairs."""
        wa = content_words(a) or [a.lower()]
        wb = content_words(b) or [b.lower()]
        total = [self.word_sim(x, y) for x in wa for y in wb]
        return sum(total) / len(total)

    def normalized_feat_sim(self, a: str, b: str) -> float:
        if self.max_corr <= 0:
            return 0.0
        return min(1.0, self.feat_sim(a, b) / self.max_corr)


def build_ws_matrix(documents: Iterable[str]) -> WSMatrix:
    """Correlation of a word pair: sum over documents of 1/(1 + distance)
    across all position pairs of the two words.  A word's self-correlation is
    defined as its row maximum, so it never loses to another word.
    """
    matrix = WSMatrix()
    corr = matrix.corr
    for doc in documents:
        tokens = content_words(doc)
        positions: dict[str, list[int]] = defaultdict(list)
        for pos, word in enumerate(tokens):
            positions[word].append(pos)
        vocab = sorted(positions)
        for a, b in itertools.combinations(vocab, 2):
            key = _pair(a, b)
            total = corr.get(key, 0.0)
            for pa in positions[a]:
                for pb in positions[b]:
                    total += 1.0 / (1.0 + abs(pa - pb))
            corr[key] = total
    row_max: dict[str, float] = defaultdict(float)
    for (a, b), value in corr.items():
        if a != b:
            row_max[a] = max(row_max[a], value)
            row_max[b] = max(row_max[b], value)
    for word, value in row_max.items():
        corr[(word, word)] = value
    matrix.max_corr = max(corr.values(), default=0.0)
    return matrix


def attribute_range(values: Iterable[float]) -> float:
    """Mean of the ten highest values minus mean of the ten lowest (all values
    when fewer than ten exist); 1 when the column is constant."""
    data = sorted(float(v) for v in values)
    if not data:
        raise RangeUnavailableError("range unavailable: no values")
    k = min(10, len(data))
    low = sum(data[:k]) / k
    high = sum(data[-k:]) / k
    spread = high - low
    return spread if spread > 0 else 1.0


def num_sim(target: float, value: float, value_range: float) -> float:
    """1 - |T - V| / range, clamped below at zero."""
    return max(0.0, 1.0 - abs(target - value) / value_range)


@dataclass
class SimilarityStore:
    ti: TIMatrix = field(default_factory=TIMatrix)
    ws: WSMatrix = field(default_factory=WSMatrix)
    ranges: dict[str, float] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "metadata": self.metadata,
            "ti": {
                "max_ti_sim": self.ti.max_ti_sim,
                "pairs": [{"a": a, "b": b, "ti_sim": self.ti.ti_sim[(a, b)],
                           "features": self.ti.features.get((a, b), {})}
                          for a, b in sorted(self.ti.ti_sim)],
            },
            "ws": {
                "max_corr": self.ws.max_corr,
                "pairs": [{"a": a, "b": b, "corr": v}
                          for (a, b), v in sorted(self.ws.corr.items())],
            },
            "ranges": dict(sorted(self.ranges.items())),
        }, indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), "utf-8")

    @classmethod
    def from_json(cls, text: str) -> "SimilarityStore":
        doc = json.loads(text)
        store = cls(metadata=doc.get("metadata", {}))
        store.ti.max_ti_sim = doc["ti"]["max_ti_sim"]
        for row in doc["ti"]["pairs"]:
            key = (row["a"], row["b"])
            store.ti.ti_sim[key] = row["ti_sim"]
            store.ti.features[key] = row.get("features", {})
        store.ws.max_corr = doc["ws"]["max_corr"]
        for row in doc["ws"]["pairs"]:
            store.ws.corr[(row["a"], row["b"])] = row["corr"]
        store.ranges = dict(doc["ranges"])
        return store

    @classmethod
    def load(cls, path: str | Path) -> "SimilarityStore":
        return cls.from_json(Path(path).read_text("utf-8"))


def build_stores(domain: Domain, sessions: Iterable[QueryLogSession],
                 documents: Iterable[str],
                 source_note: str = "") -> SimilarityStore:
    """Build all three stores for a domain in one pass."""
    type1_vocab = set(domain.lexicon.type1_values)
    ad_values: dict[str, set[str]] = {}
    type1_attrs = [a.name for a in domain.schema.of_type(AttrType.TYPE1)]
    for rid, record in domain.records.items():
        vals = set()
        for attr in type1_attrs:
            v = record.value(attr)
            if v is not None:
                vals.add(normalize_phrase(str(v)))
        ad_values[rid] = vals
    ranges = {}
    for decl in domain.schema.of_type(AttrType.TYPE3):
        values = [r.values[decl.name] for r in domain.records.values()
                  if decl.name in r.values]
        if values:
            ranges[decl.name] = attribute_range(values)
    return SimilarityStore(
        ti=build_ti_matrix(sessions, type1_vocab, ad_values),
        ws=build_ws_matrix(documents),
        ranges=ranges,
        metadata={"domain": domain.name, "built_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                  "source": source_note},
    )


@dataclass(frozen=True)
class RankedAnswer:
    record_id: str
    record: object
    kind: str                   # "exact" | "partial"
    score: float
    similarity_measure: str     # e.g. "Num_Sim on Price", "exact match"
    satisfied: int
    dropped_condition: Condition | None = None


def _numeric_target(cond: Condition, value: float) -> float:
    if cond.comparator == "between":
        low, high = cond.value
        return low if abs(value - low) <= abs(value - high) else high
    return float(cond.value)


def _similarity_term(dropped: Condition, record, stores: SimilarityStore) -> tuple[float, str]:
    if dropped.attr_type is AttrType.TYPE1:
        value = record.value(dropped.attribute)
        s = stores.ti.normalized_sim(str(dropped.value), str(value)) if value is not None else 0.0
        return s, f"TI_Sim on {dropped.attribute}"
    if dropped.attr_type is AttrType.TYPE2:
        value = record.value(dropped.attribute)
        s = stores.ws.normalized_feat_sim(str(dropped.value), str(value)) if value is not None else 0.0
        return s, f"Feat_Sim on {dropped.attribute}"
    best = 0.0
    best_attr = dropped.attributes[0] if dropped.attributes else "?"
    for attr in dropped.attributes:
        value = record.value(attr)
        value_range = stores.ranges.get(attr)
        if value is None or not value_range:
            continue
        target = _numeric_target(dropped, float(value))
        s = num_sim(target, float(value), value_range)
        if s >= best:
            best, best_attr = s, attr
    return best, f"Num_Sim on {best_attr}"


def rank_sim(conditions: list[Condition], record, dropped: Condition,
             stores: SimilarityStore) -> float:
    """(N - 1) plus the type-appropriate similarity between the dropped
    question value and the record's value; N counts the question's conditions.
    A value pair absent from its matrix contributes zero."""
    n = len(conditions)
    s, _ = _similarity_term(dropped, record, stores)
    return (n - 1) + min(1.0, max(0.0, s))


def rank_partials(partials: list[MatchResult], stores: SimilarityStore) -> list[RankedAnswer]:
    """Order partial matches by their rank score, ties by record id."""
    answers = []
    for m in partials:
        s, measure = _similarity_term(m.dropped_condition, m.record, stores)
        score = m.satisfied + min(1.0, max(0.0, s))
        answers.append(RankedAnswer(
            record_id=m.record.record_id, record=m.record, kind="partial",
            score=score, similarity_measure=measure, satisfied=m.satisfied,
            dropped_condition=m.dropped_condition))
    answers.sort(key=lambda a: (-a.score, a.record_id))
    return answers
