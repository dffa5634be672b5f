"""Domain classification of incoming questions by maximum posterior.

Naive Bayes over bag-of-words, with a burstiness-aware per-term count model:
each term's count in a document of length n is scored by a Beta-Binomial
whose parameters are fit per (term, class) by the method of moments over the
training counts.  When a term shows no overdispersion (its count variance is
at or below the matching binomial's), the term falls back to a
Laplace-smoothed multinomial probability; unseen terms always get a smoothed
nonzero probability.  Length-dependent binomial coefficients are identical
across classes for a fixed question, so they are left out everywhere; the
posterior is unaffected.

Models are immutable after training and classification is pure, so concurrent
calls are safe.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotTrainedError, TrainingError

TOKEN_RE = re.compile(r"[a-z0-9]+")

# beta-binomial total (alpha + beta) used when the variance is so large the
# moment equations have no positive solution
_EXTREME_BURST_TOTAL = 0.01


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, keep digit tokens ("2dr")."""
    return TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TermStats:
    count: int                  # occurrences across the class
    doc_count: int              # documents of the class containing the term
    alpha: float | None = None  # burstiness fit; None means multinomial fallback
    beta: float | None = None
    prob: float = 0.0           # Laplace-smoothed per-occurrence probability


@dataclass
class DomainModel:
    domain: str
    prior: float
    doc_count: int
    total_tokens: int
    mean_doc_len: float
    terms: dict[str, TermStats] = field(default_factory=dict)


def _fit_term(counts: list[int], mean_len: float, laplace_prob: float) -> TermStats:
    total = sum(counts)
    doc_count = sum(1 for c in counts if c > 0)
    m = total / len(counts)
    var = sum((c - m) ** 2 for c in counts) / len(counts)
    n = max(mean_len, 1.0)
    binom_var = m * (1.0 - m / n)
    if len(counts) < 2 or m <= 0 or m >= n or var <= binom_var:
        return TermStats(total, doc_count, prob=laplace_prob)
    p = m / n
    numerator = binom_var * n - var
    denominator = var - binom_var
    if numerator <= 0:
        s = _EXTREME_BURST_TOTAL
    else:
        s = numerator / denominator
    alpha = p * s
    beta = (1.0 - p) * s
    if alpha <= 0 or beta <= 0:
        return TermStats(total, doc_count, prob=laplace_prob)
    return TermStats(total, doc_count, alpha=alpha, beta=beta, prob=laplace_prob)


class QuestionClassifier:
    def __init__(self, models: dict[str, DomainModel], vocabulary: frozenset[str]):
        self.models = models
        self.vocabulary = vocabulary

    @property
    def domains(self) -> list[str]:
        return sorted(self.models)

    @classmethod
    def train(cls, labeled_questions: list[tuple[str, str]],
              domains: list[str] | None = None) -> "QuestionClassifier":
        """Fit one model per domain; priors follow class frequency."""
        if not labeled_questions:
            raise TrainingError("no training questions")
        by_class: dict[str, list[list[str]]] = defaultdict(list)
        for text, domain in labeled_questions:
            by_class[domain].append(tokenize(text))
        for domain in domains or ():
            if not by_class.get(domain):
                raise TrainingError(f"no training questions for domain {domain!r}")
        vocabulary = frozenset(t for docs in by_class.values() for doc in docs for t in doc)
        vocab_size = max(len(vocabulary), 1)
        total_docs = sum(len(docs) for docs in by_class.values())
        models: dict[str, DomainModel] = {}
        for domain, docs in by_class.items():
            counters = [Counter(doc) for doc in docs]
            total_tokens = sum(sum(c.values()) for c in counters)
            mean_len = total_tokens / len(docs) if docs else 0.0
            terms: dict[str, TermStats] = {}
            class_vocab = set().union(*counters) if counters else set()
            for term in class_vocab:
                counts = [c.get(term, 0) for c in counters]
                laplace = (sum(counts) + 1) / (total_tokens + vocab_size)
                terms[term] = _fit_term(counts, mean_len, laplace)
            models[domain] = DomainModel(
                domain=domain,
                prior=len(docs) / total_docs,
                doc_count=len(docs),
                total_tokens=total_tokens,
                mean_doc_len=mean_len,
                terms=terms,
            )
        return cls(models, vocabulary)

    def log_likelihood(self, question: str, model: DomainModel) -> float:
        """Log P(question | domain) up to class-independent constants.

        An empty question contributes nothing (returns 0); unseen terms get a
        smoothed nonzero probability.
        """
        counts = Counter(tokenize(question))
        n = sum(counts.values())
        if n == 0:
            return 0.0
        vocab_size = max(len(self.vocabulary), 1)
        unseen = 1.0 / (model.total_tokens + vocab_size)
        ll = 0.0
        for term, x in counts.items():
            stats = model.terms.get(term)
            if stats is not None and stats.alpha is not None:
                ll += (_lbeta(x + stats.alpha, n - x + stats.beta)
                       - _lbeta(stats.alpha, stats.beta))
            else:
                p = min(stats.prob if stats is not None else unseen, 0.999999)
                ll += x * math.log(p) + (n - x) * math.log1p(-p)
        return ll

    def posteriors(self, question: str) -> dict[str, float]:
        if not self.models:
            raise NotTrainedError("classifier not initialized")
        scores = {
            domain: math.log(model.prior) + self.log_likelihood(question, model)
            for domain, model in self.models.items()
        }
        top = max(scores.values())
        expsum = sum(math.exp(s - top) for s in scores.values())
        return {d: math.exp(s - top) / expsum for d, s in scores.items()}

    def classify(self, question: str) -> tuple[str, float]:
        """Domain with the highest posterior; ties break lexicographically."""
        post = self.posteriors(question)
        best = min(post, key=lambda d: (-post[d], d))
        return best, post[best]

    def to_json(self) -> str:
        return json.dumps({
            "vocabulary": sorted(self.vocabulary),
            "domains": {
                d: {
                    "prior": m.prior,
                    "doc_count": m.doc_count,
                    "total_tokens": m.total_tokens,
                    "mean_doc_len": m.mean_doc_len,
                    "terms": {
                        t: {"count": s.count, "doc_count": s.doc_count,
                            "alpha": s.alpha, "beta": s.beta, "prob": s.prob}
                        for t, s in sorted(m.terms.items())
                    },
                }
                for d, m in sorted(self.models.items())
            },
        })

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), "utf-8")

    @classmethod
    def from_json(cls, text: str) -> "QuestionClassifier":
        doc = json.loads(text)
        models = {}
        for domain, raw in doc["domains"].items():
            terms = {
                t: TermStats(count=s["count"], doc_count=s["doc_count"],
                             alpha=s["alpha"], beta=s["beta"], prob=s["prob"])
                for t, s in raw["terms"].items()
            }
            models[domain] = DomainModel(
                domain=domain, prior=raw["prior"], doc_count=raw["doc_count"],
                total_tokens=raw["total_tokens"], mean_doc_len=raw["mean_doc_len"],
                terms=terms)
        return cls(models, frozenset(doc["vocabulary"]))

    @classmethod
    def load(cls, path: str | Path) -> "QuestionClassifier":
        return cls.from_json(Path(path).read_text("utf-8"))


def _lbeta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
