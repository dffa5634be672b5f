"""Query planning and execution against the embedded ads store.

Evaluation is staged: identifier values first, then property values, then
numeric boundaries, superlatives always last.  Everything before the
superlative stage is a commutative AND (or the question's OR/NOT overlay), so
bucketing never changes the answer set; applying a superlative early would,
which is why it waits for the survivors of the other stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .analyzer import Condition
from .boolean import BooleanExpr, BoolOp
from .corpus import AdRecord, AttrType, Domain
from .lexicon.shorthand import values_match
from .textnorm import normalize_phrase

DEFAULT_ANSWER_CAP = 30
DEFAULT_RELAX_THRESHOLD = 5


@dataclass(frozen=True)
class EngineConfig:
    answer_cap: int = DEFAULT_ANSWER_CAP
    relax_threshold: int = DEFAULT_RELAX_THRESHOLD


@dataclass
class QueryPlan:
    stage1: list[Condition]            # identifier equality filters
    stage2: list[Condition]            # property equality filters
    stage3: list[Condition]            # numeric boundary filters
    stage4: list[Condition]            # superlative selections
    overlay: BooleanExpr | None        # OR/NOT semantics across stages 1-3
    answer_cap: int = DEFAULT_ANSWER_CAP

    @property
    def filter_conditions(self) -> list[Condition]:
        return self.stage1 + self.stage2 + self.stage3


@dataclass(frozen=True)
class MatchResult:
    record: AdRecord
    kind: str                          # "exact" | "partial"
    satisfied: int
    dropped_condition: Condition | None = None


def plan(expr: BooleanExpr, answer_cap: int = DEFAULT_ANSWER_CAP) -> QueryPlan:
    """Bucket the expression's leaves into the fixed stage order."""
    superlatives = [c for c in expr.leaves() if c.superlative is not None]
    overlay = _prune_superlatives(expr)
    stage1: list[Condition] = []
    stage2: list[Condition] = []
    stage3: list[Condition] = []
    if overlay is not None:
        for cond in overlay.leaves():
            if cond.attr_type is AttrType.TYPE1:
                stage1.append(cond)
            elif cond.attr_type is AttrType.TYPE2:
                stage2.append(cond)
            else:
                stage3.append(cond)
    return QueryPlan(stage1, stage2, stage3, superlatives, overlay, answer_cap)


def _prune_superlatives(expr: BooleanExpr) -> BooleanExpr | None:
    if expr.op is BoolOp.LEAF:
        return None if expr.condition.superlative is not None else expr
    if expr.op is BoolOp.NOT:
        return expr
    kept = [child for child in (_prune_superlatives(c) for c in expr.children)
            if child is not None]
    if not kept:
        return None
    if len(kept) == 1:
        return kept[0]
    return BooleanExpr(expr.op, tuple(kept))


def satisfies(record: AdRecord, cond: Condition) -> bool:
    """Does a record satisfy one condition?  Equality comparisons honor
    shorthand notations; inferred numerics accept any candidate attribute."""
    ok = _satisfies_plain(record, cond)
    return not ok if cond.negated else ok


def _satisfies_plain(record: AdRecord, cond: Condition) -> bool:
    if cond.superlative is not None:
        return True
    if cond.attr_type in (AttrType.TYPE1, AttrType.TYPE2):
        value = record.value(cond.attribute)
        return value is not None and values_match(str(cond.value), str(value))
    for attr in cond.attributes:
        value = record.value(attr)
        if value is None:
            continue
        if _compare(float(value), cond):
            return True
    return False


def _compare(actual: float, cond: Condition) -> bool:
    c = cond.comparator
    if c == "eq":
        return actual == cond.value
    if c == "lt":
        return actual < cond.value
    if c == "le":
        return actual <= cond.value
    if c == "gt":
        return actual > cond.value
    if c == "ge":
        return actual >= cond.value
    low, high = cond.value
    low_ok = actual > low or (cond.low_inclusive and actual == low)
    high_ok = actual < high or (cond.high_inclusive and actual == high)
    return low_ok and high_ok


class SubstringIndex:
    """Length-3 substring postings over every categorical value, plus a
    per-attribute dictionary of distinct values for shorthand-aware lookups.

    Lookups return exactly the records a full scan would: the gram postings
    and value dictionary only narrow the candidates; the final test is the
    same predicate the scanner uses.
    """

    def __init__(self, length: int = 3):
        self.length = length
        self.grams: dict[str, set[str]] = {}
        self.values: dict[str, dict[str, list[str]]] = {}

    @classmethod
    def build(cls, domain: Domain, length: int = 3) -> "SubstringIndex":
        idx = cls(length)
        categorical = [a.name for a in domain.schema.attributes
                       if a.value_kind == "categorical"]
        for record in domain.records.values():
            for attr in categorical:
                value = record.value(attr)
                if value is None:
                    continue
                norm = normalize_phrase(str(value))
                for gram in cls._grams(norm, length):
                    idx.grams.setdefault(gram, set()).add(record.record_id)
                bucket = idx.values.setdefault(attr, {}).setdefault(norm, [])
                bucket.append(record.record_id)
        return idx

    @staticmethod
    def _grams(text: str, length: int):
        if len(text) < length:
            yield text
            return
        for i in range(len(text) - length + 1):
            yield text[i:i + length]

    def lookup_equal(self, attribute: str, value: str) -> set[str]:
        """Record ids whose value for ``attribute`` equals ``value`` exactly
        or through a shorthand notation."""
        out: set[str] = set()
        for stored, ids in self.values.get(attribute, {}).items():
            if values_match(value, stored):
                out.update(ids)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "length": self.length,
            "grams": {g: sorted(ids) for g, ids in sorted(self.grams.items())},
            "values": {attr: {v: ids for v, ids in sorted(vals.items())}
                       for attr, vals in sorted(self.values.items())},
        }, indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), "utf-8")


def build_substring_index(domain: Domain, length: int = 3) -> SubstringIndex:
    return SubstringIndex.build(domain, length)


def _match_ids(cond: Condition, domain: Domain, index: SubstringIndex | None) -> set[str]:
    if (index is not None and cond.attr_type in (AttrType.TYPE1, AttrType.TYPE2)
            and cond.attribute is not None):
        candidates = index.lookup_equal(cond.attribute, str(cond.value))
        # post-filter with the scan predicate; candidate set is a superset
        return {rid for rid in candidates
                if _satisfies_plain(domain.records[rid], cond)}
    return {r.record_id for r in domain.records.values() if _satisfies_plain(r, cond)}


def _eval_expr(expr: BooleanExpr, domain: Domain, index: SubstringIndex | None) -> set[str]:
    if expr.op is BoolOp.LEAF:
        return _match_ids(expr.condition, domain, index)
    if expr.op is BoolOp.NOT:
        child = _eval_expr(expr.children[0], domain, index)
        return set(domain.records.keys()) - child
    sets = [_eval_expr(c, domain, index) for c in expr.children]
    out = sets[0]
    for s in sets[1:]:
        out = out & s if expr.op is BoolOp.AND else out | s
    return out


def _apply_superlatives(records: list[AdRecord], superlatives: list[Condition]) -> list[AdRecord]:
    survivors = records
    for sup in superlatives:
        spec = sup.superlative
        valued = [(r, r.value(spec.attribute)) for r in survivors]
        valued = [(r, float(v)) for r, v in valued if v is not None]
        if not valued:
            return []
        pick = min if spec.direction == "min" else max
        extreme = pick(v for _, v in valued)
        survivors = [r for r, v in valued if v == extreme]
    return survivors


def execute(query_plan: QueryPlan, domain: Domain,
            index: SubstringIndex | None = None) -> list[MatchResult]:
    """Exact matching: all records satisfying the overlay, superlatives applied
    to the survivors, capped at the answer cap.  Results come back in record-id
    order for determinism."""
    if query_plan.overlay is None:
        ids = set(domain.records.keys())
    else:
        ids = _eval_expr(query_plan.overlay, domain, index)
    survivors = [domain.records[rid] for rid in sorted(ids)]
    survivors = _apply_superlatives(survivors, query_plan.stage4)
    n = len(query_plan.filter_conditions)
    return [MatchResult(record=r, kind="exact", satisfied=n)
            for r in survivors[:query_plan.answer_cap]]


def branches(expr: BooleanExpr | None) -> list[list[Condition]]:
    """Conjunctive branches to relax: one per OR child, else the whole tree."""
    if expr is None:
        return []
    if expr.op is BoolOp.OR:
        return [child.leaves() for child in expr.children]
    return [expr.leaves()]


def relax_n_minus_1(conditions: list[Condition], domain: Domain,
                    exclude_ids: set[str] | None = None,
                    index: SubstringIndex | None = None) -> list[MatchResult]:
    """Drop each condition in turn and union the results of the remaining
    conjunctions.  Each partial answer satisfies all conditions except the one
    recorded as dropped.  With a single condition, every non-excluded record
    becomes a candidate for pure similarity matching downstream."""
    exclude = exclude_ids or set()
    results: dict[str, MatchResult] = {}
    n = len(conditions)
    if n == 0:
        return []
    if n == 1:
        cond = conditions[0]
        for rid in sorted(domain.records.keys()):
            if rid in exclude or satisfies(domain.records[rid], cond):
                continue
            results[rid] = MatchResult(domain.records[rid], "partial", 0, cond)
        return list(results.values())
    for i, dropped in enumerate(conditions):
        rest = conditions[:i] + conditions[i + 1:]
        ids = None
        for cond in rest:
            matched = {rid for rid, rec in domain.records.items()
                       if satisfies(rec, cond)}
            ids = matched if ids is None else ids & matched
            if not ids:
                break
        for rid in sorted(ids or ()):
            if rid in exclude or rid in results:
                continue
            if satisfies(domain.records[rid], dropped):
                continue  # satisfies everything: an exact match, not a partial
            results[rid] = MatchResult(domain.records[rid], "partial", n - 1, dropped)
    return sorted(results.values(), key=lambda m: m.record.record_id)


def _sql_names(domain_name: str) -> tuple[str, str]:
    base = domain_name.strip().capitalize()
    if len(base) > 3 and base.lower().endswith("s"):
        base = base[:-1]
    return f"{base}_Ads", f"{base}_ID"


def _sql_quote(value: str) -> str:
    return "'" + str(value).replace("'", "''") + "'"


def _format_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _pred_sql(cond: Condition) -> str:
    if cond.attr_type in (AttrType.TYPE1, AttrType.TYPE2):
        return f"C.{cond.attribute} = {_sql_quote(cond.value)}"
    ops = {"eq": "=", "lt": "<", "le": "<=", "gt": ">", "ge": ">="}
    clauses = []
    for attr in cond.attributes:
        if cond.comparator == "between":
            low, high = cond.value
            lo_op = ">=" if cond.low_inclusive else ">"
            hi_op = "<=" if cond.high_inclusive else "<"
            clauses.append(f"C.{attr} {lo_op} {_format_num(low)} "
                           f"AND C.{attr} {hi_op} {_format_num(high)}")
        else:
            clauses.append(f"C.{attr} {ops[cond.comparator]} {_format_num(cond.value)}")
    if len(clauses) == 1:
        return clauses[0]
    return " OR ".join(f"({c})" for c in clauses)


def to_sql(query_plan: QueryPlan, domain: Domain, relaxed: bool = False) -> str:
    """Structured-query text for the plan: one nested sub-select per condition.

    Advisory output for inspection or an external SQL engine; the embedded
    executor is the system of record.  When relaxation is active the
    conjunctions become disjunctions to retrieve partial answers.
    """
    table, id_col = _sql_names(domain.name)

    def render(expr: BooleanExpr) -> str:
        if expr.op is BoolOp.LEAF:
            return (f"{id_col} IN (SELECT {id_col} FROM {table} C "
                    f"WHERE {_pred_sql(expr.condition)})")
        if expr.op is BoolOp.NOT:
            inner = expr.children[0].condition
            return (f"{id_col} NOT IN (SELECT {id_col} FROM {table} C "
                    f"WHERE {_pred_sql(inner)})")
        joiner = " OR " if (expr.op is BoolOp.OR or relaxed) else " AND "
        parts = []
        for child in expr.children:
            text = render(child)
            if child.op in (BoolOp.AND, BoolOp.OR):
                text = f"({text})"
            parts.append(text)
        return joiner.join(parts)

    sql = f"SELECT * FROM {table}"
    if query_plan.overlay is not None:
        sql += f" WHERE {render(query_plan.overlay)}"
    if query_plan.stage4:
        orders = ", ".join(
            f"{c.superlative.attribute} {'ASC' if c.superlative.direction == 'min' else 'DESC'}"
            for c in query_plan.stage4)
        sql += f" ORDER BY {orders}"
    sql += f" LIMIT {query_plan.answer_cap}"
    return sql
