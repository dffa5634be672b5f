"""Implicit and explicit Boolean interpretation over extracted conditions.

The combination rules, applied left to right over the question's conditions:

1. compatible numeric constraints on one attribute are merged (negated
   comparators complemented first; opposite directions become "between";
   disjoint bounds are a contradiction);
2. a run of consecutive optional-property values ANDs its negated members and
   ORs non-negated members that exclude each other;
3. the same treatment applies to the merged numeric constraints;
4. each run attaches to its closest identifier-value group, and when several
   identifier-rooted subexpressions exist they are ORed together.

Questions that name AND/OR explicitly are reduced to this machinery after the
connectives are dropped, except for the homogeneous only-ORs case, which is
evaluated as written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from math import inf

from .analyzer import Condition, strip_negation, with_negation
from .corpus import AttrType, DomainSchema
from .errors import AnalysisError, ContradictionError
from .lexicon.shorthand import values_match
from .lexicon.tagging import TaggedToken, negate_token
from .lexicon.trie import COMPARATOR_KINDS, IdentifierKind

NEGATION_BASES = ("not", "no", "without", "except", "exclude", "excluding",
                  "remove", "nothing")


def _negation_words() -> frozenset[str]:
    out: set[str] = set()
    for base in NEGATION_BASES:
        out.update({base, base + "s", base + "d", base + "ed", base + "ing"})
        if base.endswith("e"):
            out.add(base[:-1] + "ing")
    return frozenset(out)


NEGATION_WORDS = _negation_words()

_CONDITION_KINDS = frozenset({
    IdentifierKind.TYPE1_VALUE, IdentifierKind.TYPE2_VALUE,
    IdentifierKind.TYPE3_NUMBER, IdentifierKind.TYPE3_ATTRIBUTE,
    IdentifierKind.SUPERLATIVE_COMPLETE, IdentifierKind.SUPERLATIVE_PARTIAL,
    *COMPARATOR_KINDS,
})


class BoolOp(Enum):
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    LEAF = "LEAF"


@dataclass(frozen=True)
class BooleanExpr:
    op: BoolOp
    children: tuple["BooleanExpr", ...] = ()
    condition: Condition | None = None

    def __post_init__(self):
        if self.op is BoolOp.LEAF:
            assert self.condition is not None and not self.children
        elif self.op is BoolOp.NOT:
            assert len(self.children) == 1 and self.children[0].op is BoolOp.LEAF
        else:
            assert len(self.children) >= 2 and self.condition is None

    def leaves(self) -> list[Condition]:
        """Leaf conditions with negation flags restored from NOT nodes."""
        if self.op is BoolOp.LEAF:
            return [self.condition]
        if self.op is BoolOp.NOT:
            return [with_negation(self.children[0].condition)]
        out: list[Condition] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def pretty(self) -> str:
        return _pretty(self, parent=None)


def _pretty(expr: BooleanExpr, parent: BoolOp | None) -> str:
    if expr.op is BoolOp.LEAF:
        return expr.condition.describe()
    if expr.op is BoolOp.NOT:
        return "NOT " + _pretty(expr.children[0], BoolOp.NOT)
    sep = f" {expr.op.value} "
    body = sep.join(_pretty(c, expr.op) for c in expr.children)
    if parent is not None and parent is not expr.op:
        return f"({body})"
    return body


def leaf(condition: Condition) -> BooleanExpr:
    """Leaf for a condition; negated conditions become NOT nodes."""
    if condition.negated:
        return BooleanExpr(BoolOp.NOT, (BooleanExpr(BoolOp.LEAF, condition=strip_negation(condition)),))
    return BooleanExpr(BoolOp.LEAF, condition=condition)


def and_(children: list[BooleanExpr]) -> BooleanExpr:
    return _combine(BoolOp.AND, children)


def or_(children: list[BooleanExpr]) -> BooleanExpr:
    return _combine(BoolOp.OR, children)


def _combine(op: BoolOp, children: list[BooleanExpr]) -> BooleanExpr:
    flat: list[BooleanExpr] = []
    for child in children:
        if child.op is op:
            flat.extend(child.children)
        else:
            flat.append(child)
    if not flat:
        raise ValueError(f"{op.value} needs at least one child")
    if len(flat) == 1:
        return flat[0]
    return BooleanExpr(op, tuple(flat))


def detect_negation(tokens: list[TaggedToken]) -> list[TaggedToken]:
    """Consume negation keywords, flagging the condition token each one
    precedes.  Raises on a trailing negation with nothing to negate."""
    out: list[TaggedToken] = []
    i = 0
    pending: TaggedToken | None = None
    while i < len(tokens):
        tok = tokens[i]
        surface = tok.surface.lower()
        if tok.kind is IdentifierKind.NONE and surface in NEGATION_WORDS:
            pending = tok
            i += 1
            continue
        if (tok.kind is IdentifierKind.NONE and surface in ("leave", "leaving", "leaves")
                and i + 1 < len(tokens) and tokens[i + 1].surface.lower() == "out"):
            pending = tok
            i += 2
            continue
        if pending is not None and tok.kind in _CONDITION_KINDS:
            out.append(negate_token(tok))
            pending = None
        else:
            out.append(tok)
        i += 1
    if pending is not None:
        raise AnalysisError(f"dangling negation {pending.surface!r}")
    return out


def mutually_exclusive(a: Condition, b: Condition, schema: DomainSchema) -> bool:
    """Distinct values of one identifier/property attribute cannot co-exist.
    Numeric attributes are excluded: compatible bounds get combined instead."""
    if a.comparator != "eq" or b.comparator != "eq":
        return False
    if a.attr_type not in (AttrType.TYPE1, AttrType.TYPE2):
        return False
    if a.attr_type is not b.attr_type:
        return False
    if a.attribute is None or b.attribute is None or a.attribute.lower() != b.attribute.lower():
        return False
    return not values_match(str(a.value), str(b.value))


_COMPLEMENT = {"lt": "ge", "le": "gt", "gt": "le", "ge": "lt"}


def combine_type3(conditions: list[Condition]) -> list[Condition]:
    """Merge numeric constraints on one attribute into their intersection.

    Negated comparators are first replaced by their complements; same-direction
    bounds collapse to the tightest one; opposite directions combine into a
    between.  Non-overlapping bounds raise :class:`ContradictionError`.
    Negated equalities are kept as separate negated conditions.
    """
    attr = conditions[0].attribute
    candidates = conditions[0].candidate_attributes
    low, high = -inf, inf
    low_inc = high_inc = True
    kept: list[Condition] = []
    spans = []
    surfaces = []
    for cond in conditions:
        comparator = cond.comparator
        if cond.negated:
            if comparator in _COMPLEMENT:
                comparator = _COMPLEMENT[comparator]
            else:
                kept.append(cond)  # negated equality / between stays a NOT leaf
                continue
        spans.append(cond.char_span)
        surfaces.append(cond.surface)
        if comparator == "eq":
            lo, hi, li, hi_i = cond.value, cond.value, True, True
        elif comparator == "between":
            lo, hi = cond.value
            li, hi_i = cond.low_inclusive, cond.high_inclusive
        elif comparator == "lt":
            lo, hi, li, hi_i = -inf, cond.value, True, False
        elif comparator == "le":
            lo, hi, li, hi_i = -inf, cond.value, True, True
        elif comparator == "gt":
            lo, hi, li, hi_i = cond.value, inf, False, True
        else:  # ge
            lo, hi, li, hi_i = cond.value, inf, True, True
        if lo > low or (lo == low and not li):
            low, low_inc = lo, li
        if hi < high or (hi == high and not hi_i):
            high, high_inc = hi, hi_i
    if spans:
        if low > high or (low == high and not (low_inc and high_inc)):
            raise ContradictionError(
                f"{attr}: bounds do not overlap ({format_bounds(low, high)})")
        span = (min(s[0] for s in spans), max(s[1] for s in spans))
        surface = " and ".join(s for s in surfaces if s)
        common = dict(attribute=attr, candidate_attributes=candidates,
                      surface=surface, char_span=span)
        if low == high:
            merged = Condition(AttrType.TYPE3, comparator="eq", value=low, **common)
        elif high == inf:
            merged = Condition(AttrType.TYPE3, comparator="ge" if low_inc else "gt",
                               value=low, **common)
        elif low == -inf:
            merged = Condition(AttrType.TYPE3, comparator="le" if high_inc else "lt",
                               value=high, **common)
        else:
            merged = Condition(AttrType.TYPE3, comparator="between",
                               value=(low, high), low_inclusive=low_inc,
                               high_inclusive=high_inc, **common)
        kept.insert(0, merged)
    return kept


def format_bounds(low: float, high: float) -> str:
    return f"low={low:g}, high={high:g}"


def _merge_numeric(conditions: list[Condition]) -> list[Condition]:
    """Apply combine_type3 per attribute, keeping question order (a merged
    constraint sits where its first contributor appeared)."""
    out: list = list(conditions)
    grouped: dict[object, list[int]] = {}
    for idx, cond in enumerate(conditions):
        if cond.attr_type is AttrType.TYPE3 and cond.superlative is None:
            key = cond.attribute if cond.attribute is not None else cond.candidate_attributes
            grouped.setdefault(key, []).append(idx)
    for indices in grouped.values():
        merged = combine_type3([conditions[i] for i in indices])
        for i in indices:
            out[i] = None
        out[indices[0]] = merged
    flat: list[Condition] = []
    for item in out:
        if item is None:
            continue
        if isinstance(item, list):
            flat.extend(item)
        else:
            flat.append(item)
    return flat


def _run_expr(run: list[Condition], schema: DomainSchema) -> BooleanExpr:
    """AND the negated members of a run; OR the non-negated ones that are
    mutually exclusive; AND everything else."""
    plain = [c for c in run if not c.negated]
    negated = [c for c in run if c.negated]
    parts: list[BooleanExpr] = []
    used: set[int] = set()
    for i, cond in enumerate(plain):
        if i in used:
            continue
        cluster = [cond]
        for j in range(i + 1, len(plain)):
            if j in used:
                continue
            if mutually_exclusive(cond, plain[j], schema):
                cluster.append(plain[j])
                used.add(j)
        if len(cluster) > 1:
            parts.append(or_([leaf(c) for c in cluster]))
        else:
            parts.append(leaf(cond))
    parts.extend(leaf(c) for c in negated)
    return and_(parts)


def interpret_implicit(conditions: list[Condition], schema: DomainSchema) -> BooleanExpr:
    """Build the Boolean tree for a question without usable connectives."""
    if not conditions:
        raise AnalysisError("no conditions to interpret")
    superlatives = [c for c in conditions if c.superlative is not None]
    filters = [c for c in conditions if c.superlative is None]
    filters = _merge_numeric(filters)

    if not filters:
        return and_([leaf(c) for c in superlatives])

    # identifier-value groups, split where a value excludes an earlier member
    groups: list[dict] = []
    for idx, cond in enumerate(filters):
        if cond.attr_type is not AttrType.TYPE1:
            continue
        if groups:
            current = groups[-1]
            clash = not cond.negated and any(
                mutually_exclusive(cond, member, schema)
                for member in current["members"] if not member.negated)
        else:
            clash = False
        if not groups or clash:
            groups.append({"members": [cond], "start": idx, "end": idx, "runs": []})
        else:
            groups[-1]["members"].append(cond)
            groups[-1]["end"] = idx

    # maximal runs of consecutive property / numeric conditions
    runs: list[dict] = []
    i = 0
    while i < len(filters):
        cond = filters[i]
        if cond.attr_type is AttrType.TYPE1:
            i += 1
            continue
        cat = cond.attr_type
        j = i
        while j + 1 < len(filters) and filters[j + 1].attr_type is cat:
            j += 1
        runs.append({"conds": filters[i:j + 1], "start": i, "end": j})
        i = j + 1

    if not groups:
        return and_([_run_expr(r["conds"], schema) for r in runs]
                    + [leaf(c) for c in superlatives])

    for run in runs:
        best = None
        for group in groups:
            if group["start"] > run["end"]:
                dist = (group["start"] - run["end"], 0)   # following wins ties
            elif group["end"] < run["start"]:
                dist = (run["start"] - group["end"], 1)
            else:
                dist = (0, 0)
            if best is None or dist < best[0]:
                best = (dist, group)
        best[1]["runs"].append(run)

    subexprs = []
    for group in groups:
        parts = [leaf(c) for c in group["members"]]
        for run in group["runs"]:
            parts.append(_run_expr(run["conds"], schema))
        subexprs.append(and_(parts))
    expr = or_(subexprs) if len(subexprs) > 1 else subexprs[0]
    if superlatives:
        expr = and_([expr] + [leaf(c) for c in superlatives])
    return expr


_OR_RE = re.compile(r"\bor\b", re.IGNORECASE)
_AND_RE = re.compile(r"\band\b", re.IGNORECASE)


def normalize_explicit(question: str, conditions: list[Condition]) -> str:
    """Classify the question's explicit connective structure.

    Returns "or" when the conditions are separated by nothing but ORs (and
    list commas) -- that question is evaluated as written.  Everything else
    is "implicit": connectives are dropped and the implicit rules apply.
    """
    if len(conditions) < 2:
        return "implicit"
    gaps = []
    ordered = sorted(conditions, key=lambda c: c.char_span)
    for left, right in zip(ordered, ordered[1:]):
        gaps.append(question[left.char_span[1]:right.char_span[0]])
    if any(_AND_RE.search(g) for g in gaps):
        return "implicit"
    or_gaps = [bool(_OR_RE.search(g)) for g in gaps]
    if not any(or_gaps):
        return "implicit"
    if all(has_or or "," in gap for has_or, gap in zip(or_gaps, gaps)):
        return "or"
    return "implicit"


def interpret(question: str, conditions: list[Condition],
              schema: DomainSchema) -> BooleanExpr:
    """Full Boolean interpretation: explicit special case, then implicit rules."""
    mode = normalize_explicit(question, conditions)
    if mode == "or":
        superlatives = [c for c in conditions if c.superlative is not None]
        plain = [c for c in conditions if c.superlative is None]
        expr = or_([leaf(c) for c in plain])
        if superlatives:
            expr = and_([expr] + [leaf(c) for c in superlatives])
        return expr
    return interpret_implicit(conditions, schema)
